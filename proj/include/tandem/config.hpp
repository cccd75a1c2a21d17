#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tandem/costmodel.hpp"
#include "tandem/engine.hpp"
#include "tandem/prompts.hpp"
#include "tandem/tasks.hpp"

namespace tandem::config {

struct BackendConfig {
    std::string name;
    std::string kind = "scripted";  // "scripted" | "remote"
    std::optional<PriceEntry> price;
    std::optional<double> param_count;
    std::optional<double> temperature;  // proposal temperature override

    // scripted
    nlohmann::json script;       // inline script JSON
    std::string script_path;     // or a file holding it
    bool cycle = false;

    // remote
    std::string endpoint;
    std::string model;
    std::string provider = "openai-chat";
    std::string api_key_env;
};

/// Run configuration file contents. Defaults mirror the standard setup:
/// threshold base 3.5, 10% multiplicative growth, cap 5.0, self-rating off.
struct RunConfig {
    std::string task;
    int ensemble_size = 0;  // K, must equal system1.size()
    std::vector<BackendConfig> system1;
    BackendConfig system2;

    double threshold_base = 3.5;
    double threshold_growth = 0.10;
    double threshold_cap = 5.0;
    std::string threshold_mode = "multiplicative";  // or "additive"

    std::optional<int> demonstrations;  // M; defaults to the task's convention
    bool self_evaluation = false;
    int width = 1;
    int max_output = 512;
    double proposal_temperature = 0.7;
    std::string templates_dir;
    std::string out_dir = "out";

    nlohmann::json raw;  // parsed file, persisted into transcripts
};

/// Fully validated bundle, ready to build engines from.
struct LoadedConfig {
    RunConfig run;
    tasks::TaskSpec task;
    prompts::TemplateSet templates;  // step demos already trimmed to M
    costmodel::PriceTable prices;    // explicit entries merged over defaults
    costmodel::ParamTable params;    // only backends with configured counts
    std::vector<BackendProfile> profiles;  // ensemble 0..K-1, then the reflective entry
    int demonstrations = 0;          // resolved M
    std::string config_dir;          // base for relative script paths
};

/// Parses and validates a config file. Every problem is collected before
/// throwing, so a bad config reports all errors at once and no backend (or
/// network call) is ever constructed from a half-checked file.
LoadedConfig load_config(const std::string& path);
LoadedConfig load_config_json(const nlohmann::json& doc, const std::string& origin);

/// Fresh per-instance engine: scripted backends restart their scripts,
/// remote backends are rebuilt from the same settings.
Engine make_engine(const LoadedConfig& loaded);

evaluator::ThresholdState make_threshold(const RunConfig& run);

}  // namespace tandem::config
