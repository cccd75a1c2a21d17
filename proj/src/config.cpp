#include "tandem/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "tandem/http_backend.hpp"

namespace tandem::config {

using nlohmann::json;

namespace {

std::vector<ScriptEntry> parse_entries(const json& list, const std::string& where,
                                       std::vector<std::string>& errors) {
    std::vector<ScriptEntry> entries;
    if (!list.is_array()) {
        errors.push_back(where + ": script entries must be an array");
        return entries;
    }
    for (const auto& item : list) {
        if (item.is_string()) {
            entries.push_back(ScriptEntry{item.get<std::string>(), Usage{1, 1}});
        } else if (item.is_object() && item.contains("text")) {
            ScriptEntry entry;
            entry.text = item["text"].get<std::string>();
            entry.usage.input_tokens = item.value("in", std::int64_t{1});
            entry.usage.output_tokens = item.value("out", std::int64_t{1});
            entries.push_back(std::move(entry));
        } else {
            errors.push_back(where + ": script entry must be a string or {text,in,out}");
        }
    }
    return entries;
}

json resolve_script(const BackendConfig& backend, const std::string& config_dir,
                    std::vector<std::string>& errors) {
    if (!backend.script.is_null()) return backend.script;
    if (backend.script_path.empty()) {
        errors.push_back("backend '" + backend.name + "': scripted kind needs script or script_path");
        return json();
    }
    namespace fs = std::filesystem;
    fs::path path = backend.script_path;
    if (path.is_relative() && !fs::exists(path) && !config_dir.empty()) {
        path = fs::path(config_dir) / path;
    }
    std::ifstream in(path);
    if (!in) {
        errors.push_back("backend '" + backend.name + "': cannot open script file " +
                         path.string());
        return json();
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        errors.push_back("backend '" + backend.name + "': bad script JSON: " + e.what());
        return json();
    }
}

BackendConfig parse_backend(const json& doc, const std::string& where,
                            std::vector<std::string>& errors) {
    BackendConfig backend;
    if (!doc.is_object()) {
        errors.push_back(where + ": backend entry must be an object");
        return backend;
    }
    backend.name = doc.value("name", std::string{});
    backend.kind = doc.value("kind", std::string{"scripted"});
    if (doc.contains("price")) {
        const json& price = doc["price"];
        backend.price = PriceEntry{price.value("input_per_million", 0.0),
                                   price.value("output_per_million", 0.0)};
    }
    if (doc.contains("param_count")) backend.param_count = doc["param_count"].get<double>();
    if (doc.contains("temperature")) backend.temperature = doc["temperature"].get<double>();
    backend.script = doc.value("script", json());
    backend.script_path = doc.value("script_path", std::string{});
    backend.cycle = doc.value("cycle", false);
    backend.endpoint = doc.value("endpoint", std::string{});
    backend.model = doc.value("model", std::string{});
    backend.provider = doc.value("provider", std::string{"openai-chat"});
    backend.api_key_env = doc.value("api_key_env", std::string{});
    return backend;
}

void validate_backend(const BackendConfig& backend, const std::string& where,
                      const std::string& config_dir,
                      const costmodel::PriceTable& defaults,
                      std::vector<std::string>& errors) {
    if (backend.name.empty()) errors.push_back(where + ": backend name is required");
    const std::string label = where + " '" + backend.name + "'";

    if (backend.kind == "scripted") {
        std::vector<std::string> script_errors;
        json script = resolve_script(backend, config_dir, script_errors);
        errors.insert(errors.end(), script_errors.begin(), script_errors.end());
        if (script_errors.empty()) {
            bool has_entries = false;
            if (script.is_array()) {
                has_entries = !script.empty();
            } else if (script.is_object()) {
                for (const auto& [key, value] : script.items()) {
                    if (key != "cycle" && value.is_array() && !value.empty()) has_entries = true;
                }
            }
            if (!has_entries) errors.push_back(label + ": script is empty");
        }
    } else if (backend.kind == "remote") {
        if (backend.endpoint.empty()) errors.push_back(label + ": remote kind needs endpoint");
        if (backend.model.empty()) errors.push_back(label + ": remote kind needs model");
        if (!provider_supported(backend.provider)) {
            errors.push_back(label + ": unknown provider '" + backend.provider + "'");
        }
        if (!backend.api_key_env.empty() && std::getenv(backend.api_key_env.c_str()) == nullptr) {
            errors.push_back(label + ": environment variable " + backend.api_key_env +
                             " is not set");
        }
    } else {
        errors.push_back(label + ": unknown kind '" + backend.kind + "'");
    }

    if (backend.price) {
        if (backend.price->input_per_million < 0 || backend.price->output_per_million < 0) {
            errors.push_back(label + ": prices must be >= 0");
        }
    } else if (defaults.find(backend.name) == defaults.end()) {
        errors.push_back(label + ": missing price entry (not in the shipped table either)");
    }
    if (backend.param_count && *backend.param_count <= 0) {
        errors.push_back(label + ": param_count must be > 0");
    }
    if (backend.temperature && *backend.temperature < 0) {
        errors.push_back(label + ": temperature must be >= 0");
    }
}

std::unique_ptr<Backend> build_backend(const BackendConfig& backend,
                                       const std::string& config_dir) {
    if (backend.kind == "remote") {
        RemoteConfig remote;
        remote.name = backend.name;
        remote.endpoint = backend.endpoint;
        remote.model = backend.model;
        remote.provider = backend.provider;
        remote.api_key_env = backend.api_key_env;
        return std::make_unique<HttpBackend>(std::move(remote));
    }

    std::vector<std::string> errors;
    json script = resolve_script(backend, config_dir, errors);
    if (!errors.empty()) throw ValidationError(errors.front());

    if (script.is_array()) {
        return std::make_unique<ScriptedBackend>(backend.name,
                                                 parse_entries(script, backend.name, errors),
                                                 backend.cycle);
    }

    std::map<Phase, std::vector<ScriptEntry>> by_phase;
    std::vector<ScriptEntry> fallback;
    bool cycle = backend.cycle || script.value("cycle", false);
    for (const auto& [key, value] : script.items()) {
        if (key == "cycle") continue;
        if (key == "*") {
            fallback = parse_entries(value, backend.name, errors);
            continue;
        }
        auto phase = phase_from_string(key);
        if (!phase) throw ValidationError("backend '" + backend.name + "': unknown phase '" +
                                          key + "' in script");
        by_phase[*phase] = parse_entries(value, backend.name, errors);
    }
    if (!errors.empty()) throw ValidationError(errors.front());
    return std::make_unique<ScriptedBackend>(backend.name, std::move(by_phase),
                                             std::move(fallback), cycle);
}

}  // namespace

LoadedConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ValidationError(path + ": bad config JSON: " + e.what());
    }
    return load_config_json(doc, path);
}

namespace {

LoadedConfig load_config_json_impl(const json& doc, const std::string& origin) {
    std::vector<std::string> errors;
    if (!doc.is_object()) {
        throw ValidationError(origin + ": config must be a JSON object");
    }

    const std::string config_dir =
        origin.empty() ? std::string{}
                       : std::filesystem::path(origin).parent_path().string();

    RunConfig run;
    run.raw = doc;
    run.task = doc.value("task", std::string{});
    if (run.task.empty()) errors.push_back("task is required");

    if (doc.contains("system1") && doc["system1"].is_array()) {
        int index = 0;
        for (const auto& entry : doc["system1"]) {
            run.system1.push_back(
                parse_backend(entry, "system1[" + std::to_string(index) + "]", errors));
            ++index;
        }
    } else {
        errors.push_back("system1 must be a non-empty array of backend entries");
    }
    if (doc.contains("system2")) {
        run.system2 = parse_backend(doc["system2"], "system2", errors);
    } else {
        errors.push_back("system2 backend entry is required");
    }

    run.ensemble_size = doc.value("K", static_cast<int>(run.system1.size()));
    if (run.ensemble_size != static_cast<int>(run.system1.size()) || run.system1.empty()) {
        errors.push_back("K must equal the number of system1 entries (K=" +
                         std::to_string(run.ensemble_size) + ", entries=" +
                         std::to_string(run.system1.size()) + ")");
    }

    if (doc.contains("threshold")) {
        const json& threshold = doc["threshold"];
        run.threshold_base = threshold.value("base", 3.5);
        run.threshold_growth = threshold.value("growth", 0.10);
        run.threshold_cap = threshold.value("cap", 5.0);
        run.threshold_mode = threshold.value("mode", std::string{"multiplicative"});
    }
    // a negative base never gates (pure intuition mode), base >= cap always
    // gates; both degenerate modes are legitimate configurations
    if (run.threshold_growth < 0) errors.push_back("threshold.growth must be >= 0");
    if (run.threshold_cap <= 0) errors.push_back("threshold.cap must be > 0");
    if (run.threshold_mode != "multiplicative" && run.threshold_mode != "additive") {
        errors.push_back("threshold.mode must be 'multiplicative' or 'additive'");
    }

    if (doc.contains("M")) run.demonstrations = doc["M"].get<int>();
    run.self_evaluation = doc.value("self_evaluation", false);
    run.width = doc.value("width", 1);
    run.max_output = doc.value("max_output", 512);
    run.proposal_temperature = doc.value("proposal_temperature", 0.7);
    run.templates_dir = doc.value("templates_dir", std::string{});
    run.out_dir = doc.value("out_dir", std::string{"out"});

    if (run.width < 1) errors.push_back("width must be >= 1");
    if (run.max_output < 1) errors.push_back("max_output must be >= 1");
    if (run.proposal_temperature < 0) errors.push_back("proposal_temperature must be >= 0");

    LoadedConfig loaded;
    loaded.config_dir = config_dir;
    loaded.task = tasks::make_task(run.task);
    loaded.demonstrations = run.demonstrations.value_or(loaded.task.demonstrations);
    if (loaded.demonstrations < 0) errors.push_back("M must be >= 0");

    // Backend-level checks and price/param tables. Prices and params are keyed
    // by name, so entries sharing a name must not contradict each other.
    const costmodel::PriceTable defaults = costmodel::default_price_table();
    std::set<std::string> ensemble_names;
    auto check = [&](const BackendConfig& backend, const std::string& where) {
        validate_backend(backend, where, config_dir, defaults, errors);
        if (backend.name.empty()) return;
        PriceEntry price;
        if (backend.price) {
            price = *backend.price;
        } else {
            auto it = defaults.find(backend.name);
            if (it == defaults.end()) return;  // already reported
            price = it->second;
        }
        auto [it, inserted] = loaded.prices.emplace(backend.name, price);
        if (!inserted && (it->second.input_per_million != price.input_per_million ||
                          it->second.output_per_million != price.output_per_million)) {
            errors.push_back(where + " '" + backend.name +
                             "': conflicting prices for the same backend name");
        }
        if (backend.param_count) loaded.params[backend.name] = *backend.param_count;
    };
    for (std::size_t i = 0; i < run.system1.size(); ++i) {
        const std::string where = "system1[" + std::to_string(i) + "]";
        check(run.system1[i], where);
        if (!run.system1[i].name.empty() &&
            !ensemble_names.insert(run.system1[i].name).second) {
            errors.push_back(where + ": duplicate backend name '" + run.system1[i].name + "'");
        }
    }
    check(run.system2, "system2");

    // Templates and demonstration counts
    try {
        loaded.templates = run.templates_dir.empty()
                               ? prompts::TemplateSet::builtin()
                               : prompts::TemplateSet::load_dir(run.templates_dir);
        for (int step = 1; step <= loaded.task.steps; ++step) {
            prompts::PromptTemplate tmpl =
                loaded.templates.get(run.task, prompts::Role::Step, step);
            if (static_cast<int>(tmpl.demonstrations.size()) < loaded.demonstrations) {
                errors.push_back("task '" + run.task + "' step " + std::to_string(step) +
                                 ": template has " +
                                 std::to_string(tmpl.demonstrations.size()) +
                                 " demonstrations, M=" +
                                 std::to_string(loaded.demonstrations) + " requires more");
            } else {
                tmpl.demonstrations.resize(static_cast<std::size_t>(loaded.demonstrations));
                loaded.templates.put(run.task, prompts::Role::Step, step, std::move(tmpl));
            }
        }
    } catch (const Error& e) {
        errors.push_back(e.what());
    }

    if (!errors.empty()) {
        std::ostringstream out;
        out << "invalid config (" << origin << "): " << errors.size() << " problem(s)";
        for (const auto& error : errors) out << "\n  - " << error;
        throw ValidationError(out.str());
    }

    auto profile_of = [&](const BackendConfig& backend, int index) {
        return BackendProfile{BackendId{index, backend.name},
                              loaded.prices.at(backend.name), backend.param_count,
                              backend.kind};
    };
    for (std::size_t i = 0; i < run.system1.size(); ++i) {
        loaded.profiles.push_back(profile_of(run.system1[i], static_cast<int>(i)));
    }
    loaded.profiles.push_back(profile_of(run.system2, kReflectiveIndex));

    loaded.run = std::move(run);
    return loaded;
}

}  // namespace

LoadedConfig load_config_json(const json& doc, const std::string& origin) {
    try {
        return load_config_json_impl(doc, origin);
    } catch (const json::exception& e) {
        // wrongly typed values (e.g. a string where a number belongs)
        throw ValidationError(origin + ": malformed config value: " + e.what());
    }
}

Engine make_engine(const LoadedConfig& loaded) {
    GenOptions options;
    options.max_output = loaded.run.max_output;
    options.proposal_temperature = loaded.run.proposal_temperature;
    options.include_self_evaluation = loaded.run.self_evaluation;
    options.demonstrations = loaded.demonstrations;
    for (const auto& backend : loaded.run.system1) {
        options.per_backend_temperature.push_back(backend.temperature.value_or(-1.0));
    }

    std::vector<std::unique_ptr<Backend>> ensemble;
    ensemble.reserve(loaded.run.system1.size());
    for (const auto& backend : loaded.run.system1) {
        ensemble.push_back(build_backend(backend, loaded.config_dir));
    }
    return Engine(std::move(ensemble), build_backend(loaded.run.system2, loaded.config_dir),
                  loaded.templates, std::move(options));
}

evaluator::ThresholdState make_threshold(const RunConfig& run) {
    evaluator::ThresholdState state;
    state.base = run.threshold_base;
    state.growth = run.threshold_growth;
    state.cap = run.threshold_cap;
    state.mode = run.threshold_mode == "additive"
                     ? evaluator::ThresholdState::Growth::Additive
                     : evaluator::ThresholdState::Growth::Multiplicative;
    return state;
}

}  // namespace tandem::config
