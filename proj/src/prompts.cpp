#include "tandem/prompts.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace tandem::prompts {

const char* to_string(Role role) {
    switch (role) {
        case Role::Step: return "step";
        case Role::Interact: return "interact";
        case Role::Update: return "update";
        case Role::Evaluate: return "evaluate";
        case Role::Intervene: return "intervene";
    }
    return "unknown";
}

std::optional<Role> role_from_string(const std::string& name) {
    if (name.rfind("step", 0) == 0) return Role::Step;
    if (name == "interact") return Role::Interact;
    if (name == "update") return Role::Update;
    if (name == "evaluate") return Role::Evaluate;
    if (name == "intervene") return Role::Intervene;
    return std::nullopt;
}

namespace {

/// Walks `body` calling on_text for literal runs and on_placeholder for each
/// {name}. Shared by render() and placeholders().
template <typename TextFn, typename PlaceholderFn>
void scan(const std::string& body, TextFn&& on_text, PlaceholderFn&& on_placeholder) {
    std::size_t i = 0;
    const std::size_t n = body.size();
    while (i < n) {
        char c = body[i];
        if (c == '{') {
            if (i + 1 < n && body[i + 1] == '{') {
                on_text('{');
                i += 2;
                continue;
            }
            std::size_t close = body.find('}', i + 1);
            if (close == std::string::npos) {
                // unterminated brace: keep literal
                on_text('{');
                ++i;
                continue;
            }
            on_placeholder(body.substr(i + 1, close - i - 1));
            i = close + 1;
            continue;
        }
        if (c == '}' && i + 1 < n && body[i + 1] == '}') {
            on_text('}');
            i += 2;
            continue;
        }
        on_text(c);
        ++i;
    }
}

}  // namespace

std::vector<std::string> placeholders(const std::string& body) {
    std::vector<std::string> names;
    scan(
        body, [](char) {},
        [&](std::string name) {
            if (std::find(names.begin(), names.end(), name) == names.end()) {
                names.push_back(std::move(name));
            }
        });
    return names;
}

std::string render(const PromptTemplate& tmpl,
                   const std::map<std::string, std::string>& bindings) {
    std::string out;
    out.reserve(tmpl.body.size());
    std::vector<std::string> missing;
    scan(
        tmpl.body, [&](char c) { out.push_back(c); },
        [&](std::string name) {
            auto it = bindings.find(name);
            if (it == bindings.end()) {
                if (std::find(missing.begin(), missing.end(), name) == missing.end()) {
                    missing.push_back(std::move(name));
                }
            } else {
                out += it->second;
            }
        });
    if (!missing.empty()) {
        std::string what = "unbound placeholders in template '" + tmpl.id + "':";
        for (const auto& name : missing) what += " " + name;
        throw RenderError(what, std::move(missing));
    }
    if (tmpl.demonstrations.empty()) {
        return out;
    }
    std::string full;
    for (const auto& demo : tmpl.demonstrations) {
        full += demo;
        full += "\n\n";
    }
    full += out;
    return full;
}

// ---------------------------------------------------------------------------
// TemplateSet
// ---------------------------------------------------------------------------

std::string TemplateSet::key(const std::string& task, Role role, int step) {
    if (role == Role::Step) {
        return task + ".step" + std::to_string(step);
    }
    return task + "." + to_string(role);
}

void TemplateSet::put(const std::string& task, Role role, int step, PromptTemplate tmpl) {
    templates_[key(task, role, step)] = std::move(tmpl);
}

bool TemplateSet::has(const std::string& task, Role role, int step) const {
    return templates_.count(key(task, role, step)) > 0;
}

const PromptTemplate& TemplateSet::get(const std::string& task, Role role, int step) const {
    for (const std::string& k :
         {key(task, role, step), key("default", role, step), key("default", role, 1)}) {
        auto it = templates_.find(k);
        if (it != templates_.end()) return it->second;
    }
    throw ValidationError("no template for task '" + task + "', role '" +
                          std::string(to_string(role)) + "', step " + std::to_string(step));
}

TemplateSet TemplateSet::builtin() {
    TemplateSet set;
    auto add = [&](const std::string& task, Role role, int step, std::string body,
                   std::vector<std::string> demos = {}) {
        set.put(task, role, step,
                PromptTemplate{key(task, role, step), std::move(body), std::move(demos)});
    };

    add("default", Role::Step, 1, "{question}");

    add("default", Role::Interact, 0,
        "You are reviewing a peer's proposed thought for the task below.\n"
        "\n"
        "Task:\n"
        "{task}\n"
        "\n"
        "Peer thought:\n"
        "{thought}\n"
        "\n"
        "Give brief, concrete feedback: point out mistakes, risky assumptions, and the "
        "single most useful improvement. Do not rewrite the whole thought.");

    add("default", Role::Update, 0,
        "Task:\n"
        "{task}\n"
        "\n"
        "Your previous thought:\n"
        "{own}\n"
        "\n"
        "{feedback}\n"
        "\n"
        "Revise your thought, taking the feedback into account. Reply with the revised "
        "thought only.");

    add("default", Role::Evaluate, 0,
        "You are assessing a proposed thought for the task below.\n"
        "\n"
        "Task:\n"
        "{task}\n"
        "\n"
        "Proposed thought:\n"
        "{thought}\n"
        "\n"
        "Rate your confidence that this thought is correct and useful with a score from "
        "0 to 5, where 0 means certainly wrong and 5 means certainly correct. Reply with "
        "the numeric score only.");

    add("default", Role::Intervene, 0,
        "Carefully solve the task below. A proposed thought is attached; it may contain "
        "mistakes. Verify it, correct what is wrong, and produce the best final result.\n"
        "\n"
        "Task:\n"
        "{task}\n"
        "\n"
        "Proposed thought:\n"
        "{thought}\n"
        "\n"
        "Reply with the corrected result only.");

    add("game24", Role::Step, 1,
        "Use the four numbers {numbers} exactly once each, with + - * / and parentheses, "
        "to reach 24. Reply with one expression per line.",
        {"Example:\nNumbers: 4 4 6 8\nAnswer: (4 + 8) * (6 - 4)"});

    add("gsm8k", Role::Step, 1,
        "Solve the problem step by step, then give the final numeric answer on the last "
        "line as \"Answer: <number>\".\n"
        "\n"
        "Problem:\n"
        "{question}");

    add("trivia", Role::Step, 1,
        "Write a short, coherent story about {topic} that naturally mentions the correct "
        "answer to every question below.\n"
        "\n"
        "Questions:\n"
        "{questions}");

    add("openqa", Role::Step, 1,
        "Draft a concise outline for answering the question below. List the key points "
        "to cover.\n"
        "\n"
        "Question:\n"
        "{question}");

    add("openqa", Role::Step, 2,
        "Write the full answer to the question below, following the outline from the "
        "previous step.\n"
        "\n"
        "Question:\n"
        "{question}");

    add("logic_grid", Role::Step, 1,
        "Solve the logic puzzle below. Reply with the final answer only.\n"
        "\n"
        "Puzzle:\n"
        "{puzzle}");

    return set;
}

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError("cannot read template file " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    std::string text = buffer.str();
    if (!text.empty() && text.back() == '\n') text.pop_back();
    return text;
}

}  // namespace

TemplateSet TemplateSet::load_dir(const std::string& path) {
    TemplateSet set = builtin();
    namespace fs = std::filesystem;
    if (!fs::is_directory(path)) {
        throw ValidationError("templates directory not found: " + path);
    }

    struct Demo {
        std::string task;
        Role role;
        int step;
        int index;
        std::string text;
    };
    std::vector<Demo> demos;

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());

    for (const auto& file : files) {
        std::string stem = file.stem().string();  // "<task>.<role>[.demo<J>]"
        std::vector<std::string> parts;
        std::size_t pos = 0;
        while (true) {
            std::size_t dot = stem.find('.', pos);
            parts.push_back(stem.substr(pos, dot - pos));
            if (dot == std::string::npos) break;
            pos = dot + 1;
        }
        if (parts.size() < 2) continue;

        const std::string& task = parts[0];
        auto role = role_from_string(parts[1]);
        if (!role) continue;
        int step = 0;
        if (*role == Role::Step) {
            step = std::atoi(parts[1].c_str() + 4);
            if (step <= 0) continue;
        }

        if (parts.size() == 3 && parts[2].rfind("demo", 0) == 0) {
            int index = std::atoi(parts[2].c_str() + 4);
            demos.push_back(Demo{task, *role, step, index, read_file(file)});
            continue;
        }
        set.put(task, *role, step,
                PromptTemplate{key(task, *role, step), read_file(file), {}});
    }

    std::stable_sort(demos.begin(), demos.end(),
                     [](const Demo& a, const Demo& b) { return a.index < b.index; });
    for (auto& demo : demos) {
        auto it = set.templates_.find(key(demo.task, demo.role, demo.step));
        if (it == set.templates_.end()) {
            throw ValidationError("demonstration file without a template: " + demo.task +
                                  "." + to_string(demo.role));
        }
        it->second.demonstrations.push_back(std::move(demo.text));
    }
    return set;
}

}  // namespace tandem::prompts
