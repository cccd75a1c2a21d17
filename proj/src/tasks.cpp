#include "tandem/tasks.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

namespace tandem::tasks {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Task catalog
// ---------------------------------------------------------------------------

TaskSpec make_task(const std::string& id) {
    if (id == "game24") return TaskSpec{id, TaskKind::Game24, 1, 1};
    if (id == "gsm8k") return TaskSpec{id, TaskKind::Gsm8k, 1, 0};
    if (id == "trivia") return TaskSpec{id, TaskKind::Trivia, 1, 0};
    if (id == "openqa") return TaskSpec{id, TaskKind::OpenQa, 2, 0};
    if (id == "logic_grid") return TaskSpec{id, TaskKind::LogicGrid, 1, 0};
    return TaskSpec{id, TaskKind::Generic, 1, 0};
}

std::vector<TaskInstance> load_instances(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open instances file: " + path);
    }
    std::vector<TaskInstance> instances;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json doc;
        try {
            doc = json::parse(line);
        } catch (const json::exception& e) {
            throw ValidationError(path + ":" + std::to_string(line_number) +
                                  ": bad instance JSON: " + e.what());
        }
        TaskInstance instance;
        if (doc.contains("id")) {
            instance.id = doc["id"].is_string() ? doc["id"].get<std::string>()
                                                : doc["id"].dump();
        } else {
            instance.id = "line" + std::to_string(line_number);
        }
        instance.payload = doc.value("payload", json::object());
        instance.gold = doc.value("gold", json());
        instances.push_back(std::move(instance));
    }
    return instances;
}

namespace {

std::string payload_string(const TaskInstance& instance, const char* field) {
    const json& payload = instance.payload;
    if (payload.is_string() && std::string(field) == "question") {
        return payload.get<std::string>();
    }
    if (!payload.is_object() || !payload.contains(field) || !payload[field].is_string()) {
        throw ValidationError("instance '" + instance.id + "': payload field '" + field +
                              "' missing or not a string");
    }
    return payload[field].get<std::string>();
}

std::array<int, 4> payload_numbers(const TaskInstance& instance) {
    const json& payload = instance.payload;
    if (!payload.is_object() || !payload.contains("numbers") ||
        !payload["numbers"].is_array() || payload["numbers"].size() != 4) {
        throw ValidationError("instance '" + instance.id +
                              "': payload.numbers must be an array of 4 integers");
    }
    std::array<int, 4> numbers{};
    for (int i = 0; i < 4; ++i) numbers[static_cast<std::size_t>(i)] =
        payload["numbers"][static_cast<std::size_t>(i)].get<int>();
    return numbers;
}

}  // namespace

std::map<std::string, std::string> step_bindings(const TaskSpec& task,
                                                 const TaskInstance& instance, int step) {
    (void)step;
    switch (task.kind) {
        case TaskKind::Game24: {
            auto numbers = payload_numbers(instance);
            std::string joined;
            for (int n : numbers) {
                if (!joined.empty()) joined += ' ';
                joined += std::to_string(n);
            }
            return {{"numbers", joined}};
        }
        case TaskKind::Gsm8k:
        case TaskKind::OpenQa:
        case TaskKind::Generic:
            return {{"question", payload_string(instance, "question")}};
        case TaskKind::Trivia: {
            std::string questions;
            const json& payload = instance.payload;
            if (payload.is_object() && payload.contains("questions") &&
                payload["questions"].is_array()) {
                int index = 1;
                for (const auto& q : payload["questions"]) {
                    questions += std::to_string(index++) + ". " + q.get<std::string>() + "\n";
                }
                if (!questions.empty()) questions.pop_back();
            }
            return {{"topic", payload_string(instance, "topic")}, {"questions", questions}};
        }
        case TaskKind::LogicGrid:
            return {{"puzzle", payload_string(instance, "puzzle")}};
    }
    return {};
}

// ---------------------------------------------------------------------------
// Game of 24 verifier
// ---------------------------------------------------------------------------

namespace {

struct ExprError {
    std::string reason;
};

/// Replaces the unicode arithmetic signs with their ASCII forms so the
/// tokenizer below only sees single-byte operators.
std::string normalize_operators(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size();) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (c == 0xE2 && i + 2 < text.size() &&
            static_cast<unsigned char>(text[i + 1]) == 0x88 &&
            static_cast<unsigned char>(text[i + 2]) == 0x92) {
            out.push_back('-');  // U+2212 minus sign
            i += 3;
        } else if (c == 0xC3 && i + 1 < text.size() &&
                   static_cast<unsigned char>(text[i + 1]) == 0x97) {
            out.push_back('*');  // U+00D7 multiplication sign
            i += 2;
        } else if (c == 0xC3 && i + 1 < text.size() &&
                   static_cast<unsigned char>(text[i + 1]) == 0xB7) {
            out.push_back('/');  // U+00F7 division sign
            i += 2;
        } else {
            out.push_back(text[i]);
            ++i;
        }
    }
    return out;
}

class ExprParser {
public:
    explicit ExprParser(std::string_view text) : text_(text) {}

    Rational parse(std::vector<std::int64_t>& operands) {
        operands_ = &operands;
        pos_ = 0;
        Rational value = expression(0);
        skip_ws();
        if (pos_ != text_.size()) {
            throw ExprError{"unexpected character '" + std::string(1, text_[pos_]) +
                            "' at offset " + std::to_string(pos_)};
        }
        return value;
    }

private:
    Rational expression(int depth) {
        Rational value = term(depth);
        while (true) {
            skip_ws();
            if (peek() == '+' || peek() == '-') {
                char op = take();
                Rational rhs = term(depth);
                value = (op == '+') ? value + rhs : value - rhs;
            } else {
                return value;
            }
        }
    }

    Rational term(int depth) {
        Rational value = factor(depth);
        while (true) {
            skip_ws();
            if (peek() == '*' || peek() == '/') {
                char op = take();
                Rational rhs = factor(depth);
                if (op == '/') {
                    if (rhs.num() == 0) throw ExprError{"division by zero"};
                    value = value / rhs;
                } else {
                    value = value * rhs;
                }
            } else {
                return value;
            }
        }
    }

    Rational factor(int depth) {
        if (depth > 64) throw ExprError{"expression too deeply nested"};
        skip_ws();
        if (peek() == '(') {
            take();
            Rational value = expression(depth + 1);
            skip_ws();
            if (peek() != ')') throw ExprError{"missing closing parenthesis"};
            take();
            return value;
        }
        if (std::isdigit(static_cast<unsigned char>(peek()))) {
            std::int64_t number = 0;
            int digits = 0;
            while (std::isdigit(static_cast<unsigned char>(peek()))) {
                number = number * 10 + (take() - '0');
                if (++digits > 9) throw ExprError{"number too large"};
            }
            operands_->push_back(number);
            return Rational(number);
        }
        if (pos_ >= text_.size()) throw ExprError{"unexpected end of expression"};
        throw ExprError{"unexpected character '" + std::string(1, peek()) + "' at offset " +
                        std::to_string(pos_)};
    }

    void skip_ws() {
        while (pos_ < text_.size() &&
               std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
    char take() { return text_[pos_++]; }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::vector<std::int64_t>* operands_ = nullptr;
};

constexpr std::int64_t kTarget = 24;

}  // namespace

bool verify_game24(std::string_view expression, const std::array<int, 4>& numbers,
                   std::string* diagnostic) {
    auto fail = [&](std::string reason) {
        if (diagnostic) *diagnostic = std::move(reason);
        return false;
    };

    const std::string normalized = normalize_operators(expression);
    std::vector<std::int64_t> operands;
    Rational value;
    try {
        value = ExprParser(normalized).parse(operands);
    } catch (const ExprError& e) {
        return fail("parse error: " + e.reason);
    } catch (const Error& e) {
        return fail(std::string("arithmetic error: ") + e.what());
    }

    std::vector<std::int64_t> expected(numbers.begin(), numbers.end());
    std::sort(expected.begin(), expected.end());
    std::sort(operands.begin(), operands.end());
    if (operands != expected) {
        return fail("expression does not use exactly the given numbers");
    }

    // exact rational comparison; the 1e-6 tolerance only matters for callers
    // feeding pre-rounded values
    Rational difference = value - Rational(kTarget);
    double magnitude = difference.to_double();
    if (magnitude < 0) magnitude = -magnitude;
    if (magnitude > 1e-6) {
        return fail("expression evaluates to " + value.to_string() + ", not 24");
    }
    if (diagnostic) diagnostic->clear();
    return true;
}

int game24_diversity(const std::vector<std::string>& expressions,
                     const std::array<int, 4>& numbers) {
    std::set<std::string> distinct;
    for (const auto& expression : expressions) {
        if (!verify_game24(expression, numbers)) continue;
        std::string normalized;
        normalized.reserve(expression.size());
        for (char c : expression) {
            if (!std::isspace(static_cast<unsigned char>(c))) normalized.push_back(c);
        }
        distinct.insert(std::move(normalized));
    }
    return static_cast<int>(distinct.size());
}

// ---------------------------------------------------------------------------
// Numeric answer extraction
// ---------------------------------------------------------------------------

std::optional<Rational> extract_numeric_answer(std::string_view text) {
    static const std::regex number_pattern(
        R"([-+]?\$?(?:\d{1,3}(?:,\d{3})+|\d+)(?:\.\d+)?)");

    const std::string normalized = normalize_operators(text);
    std::optional<std::string> last;
    for (auto it = std::sregex_iterator(normalized.begin(), normalized.end(), number_pattern);
         it != std::sregex_iterator(); ++it) {
        last = it->str();
    }
    if (!last) return std::nullopt;

    std::string cleaned;
    for (char c : *last) {
        if (c != ',' && c != '$') cleaned.push_back(c);
    }
    bool negative = false;
    std::size_t start = 0;
    if (cleaned[0] == '+' || cleaned[0] == '-') {
        negative = cleaned[0] == '-';
        start = 1;
    }
    std::string integer_part;
    std::string fraction_part;
    bool in_fraction = false;
    for (std::size_t i = start; i < cleaned.size(); ++i) {
        if (cleaned[i] == '.') {
            in_fraction = true;
        } else {
            (in_fraction ? fraction_part : integer_part).push_back(cleaned[i]);
        }
    }
    if (integer_part.size() + fraction_part.size() > 18) return std::nullopt;

    std::int64_t numerator = 0;
    for (char c : integer_part) numerator = numerator * 10 + (c - '0');
    std::int64_t denominator = 1;
    for (char c : fraction_part) {
        numerator = numerator * 10 + (c - '0');
        denominator *= 10;
    }
    if (negative) numerator = -numerator;
    return Rational(numerator, denominator);
}

// ---------------------------------------------------------------------------
// Trivia mention scoring
// ---------------------------------------------------------------------------

namespace {

std::string to_lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

double trivia_mention_score(std::string_view text,
                            const std::vector<std::vector<std::string>>& answers,
                            int question_count) {
    if (question_count < 1) {
        throw ValidationError("trivia_mention_score: question count must be >= 1");
    }
    const std::string haystack = to_lower(text);
    int mentioned = 0;
    for (const auto& accepted : answers) {
        for (const auto& answer : accepted) {
            if (!answer.empty() && haystack.find(to_lower(answer)) != std::string::npos) {
                ++mentioned;
                break;
            }
        }
    }
    return static_cast<double>(mentioned) / static_cast<double>(question_count);
}

// ---------------------------------------------------------------------------
// Answer scoring
// ---------------------------------------------------------------------------

namespace {

std::string trim(std::string_view text) {
    std::size_t begin = text.find_first_not_of(" \t\r\n");
    if (begin == std::string_view::npos) return "";
    std::size_t end = text.find_last_not_of(" \t\r\n");
    return std::string(text.substr(begin, end - begin + 1));
}

/// Pulls candidate expressions out of free-form model output: one candidate
/// per line, label prefixes ("Answer: ...") and "= 24" tails removed.
std::vector<std::string> expression_candidates(const std::string& answer) {
    std::vector<std::string> candidates;
    std::istringstream lines(answer);
    std::string line;
    while (std::getline(lines, line)) {
        std::size_t colon = line.rfind(':');
        if (colon != std::string::npos) line = line.substr(colon + 1);
        std::size_t equals = line.find('=');
        if (equals != std::string::npos) line = line.substr(0, equals);
        line = trim(line);
        if (!line.empty()) candidates.push_back(line);
    }
    return candidates;
}

std::optional<Rational> gold_number(const json& gold) {
    if (gold.is_number_integer()) return Rational(gold.get<std::int64_t>());
    if (gold.is_string()) return extract_numeric_answer(gold.get<std::string>());
    if (gold.is_number_float()) return extract_numeric_answer(gold.dump());
    return std::nullopt;
}

}  // namespace

EvalOutcome score_answer(const TaskSpec& task, const TaskInstance& instance,
                         const std::string& answer) {
    EvalOutcome outcome;
    switch (task.kind) {
        case TaskKind::Game24: {
            auto numbers = payload_numbers(instance);
            auto candidates = expression_candidates(answer);
            int diversity = game24_diversity(candidates, numbers);
            outcome.diversity = diversity;
            outcome.score = diversity > 0 ? 1.0 : 0.0;
            break;
        }
        case TaskKind::Gsm8k: {
            auto expected = gold_number(instance.gold);
            if (!expected) break;  // no gold, no grade
            auto actual = extract_numeric_answer(answer);
            outcome.score = (actual && *actual == *expected) ? 1.0 : 0.0;
            break;
        }
        case TaskKind::Trivia: {
            if (!instance.gold.is_object() || !instance.gold.contains("answers")) break;
            std::vector<std::vector<std::string>> answers;
            for (const auto& group : instance.gold["answers"]) {
                std::vector<std::string> accepted;
                if (group.is_array()) {
                    for (const auto& item : group) accepted.push_back(item.get<std::string>());
                } else if (group.is_string()) {
                    accepted.push_back(group.get<std::string>());
                }
                answers.push_back(std::move(accepted));
            }
            int question_count = static_cast<int>(answers.size());
            if (instance.gold.contains("question_count")) {
                question_count = instance.gold["question_count"].get<int>();
            }
            if (question_count >= 1) {
                outcome.score = trivia_mention_score(answer, answers, question_count);
            }
            break;
        }
        case TaskKind::LogicGrid:
        case TaskKind::Generic: {
            if (instance.gold.is_string()) {
                outcome.score =
                    trim(answer) == trim(instance.gold.get<std::string>()) ? 1.0 : 0.0;
            }
            break;
        }
        case TaskKind::OpenQa:
            // quality needs a pairwise judge; left ungraded here
            break;
    }
    return outcome;
}

// ---------------------------------------------------------------------------
// Pluggable judge
// ---------------------------------------------------------------------------

namespace {

CompletionResponse ask_judge(Backend& judge, std::string prompt) {
    CompletionRequest request;
    request.prompt = std::move(prompt);
    request.max_output = 256;
    request.temperature = 0.0;
    request.phase = Phase::Evaluate;
    return judge.complete(request);
}

}  // namespace

JudgeVerdict judge_quality(Backend& judge, std::string_view question,
                           std::string_view answer_a, std::string_view answer_b) {
    std::string prompt =
        "Compare the two answers to the question below and decide which is better.\n\n"
        "Question:\n" + std::string(question) +
        "\n\nAnswer A:\n" + std::string(answer_a) +
        "\n\nAnswer B:\n" + std::string(answer_b) +
        "\n\nReply with \"A\", \"B\", or \"tie\", followed by a one-sentence reason.";
    CompletionResponse response = ask_judge(judge, std::move(prompt));

    const std::string lowered = to_lower(response.text);
    if (lowered.find("tie") != std::string::npos) {
        return JudgeVerdict{Preference::Tie, response.text};
    }
    static const std::regex verdict_pattern(R"(\b([AB])\b)");
    std::smatch match;
    if (std::regex_search(response.text, match, verdict_pattern)) {
        return JudgeVerdict{match[1] == "A" ? Preference::A : Preference::B, response.text};
    }
    throw ParseError("judge returned no A/B/tie verdict: " + response.text);
}

int judge_diversity(Backend& judge, std::string_view question, std::string_view answer_a,
                    std::string_view answer_b) {
    std::string prompt =
        "The two answers below respond to the same question. Rate how diverse they are "
        "on a scale from 1 to 10 (1 = nearly identical, 10 = entirely different "
        "approaches).\n\n"
        "Question:\n" + std::string(question) +
        "\n\nAnswer A:\n" + std::string(answer_a) +
        "\n\nAnswer B:\n" + std::string(answer_b) +
        "\n\nReply as \"diversity: <score>\".";
    CompletionResponse response = ask_judge(judge, std::move(prompt));

    static const std::regex score_pattern(R"(\b(10|[1-9])\b)");
    std::smatch match;
    if (std::regex_search(response.text, match, score_pattern)) {
        return std::stoi(match[1]);
    }
    throw ParseError("judge returned no 1-10 diversity score: " + response.text);
}

}  // namespace tandem::tasks
