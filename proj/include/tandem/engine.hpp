#pragma once

#include <atomic>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tandem/backend.hpp"
#include "tandem/prompts.hpp"
#include "tandem/thought.hpp"

namespace tandem {

/// Generation knobs shared by the pipeline stages. Proposal calls may use a
/// nonzero temperature for diversity; refinement, evaluation and intervention
/// calls default to 0.
struct GenOptions {
    int max_output = 512;
    double proposal_temperature = 0.7;
    std::vector<double> per_backend_temperature;  // overrides by ensemble index
    double refine_temperature = 0.0;
    double intervene_temperature = 0.0;
    bool include_self_evaluation = false;
    int demonstrations = 0;  // M, used for template validation
};

/// Per-run bundle: the K-member intuition ensemble, the reflective backend,
/// templates, options, the phase-tagged call log, and the thought id counter.
/// One Engine drives exactly one problem instance; nothing is shared across
/// concurrently running instances.
class Engine {
public:
    Engine(std::vector<std::unique_ptr<Backend>> ensemble,
           std::unique_ptr<Backend> reflective,
           prompts::TemplateSet templates,
           GenOptions options);

    int ensemble_size() const { return static_cast<int>(ensemble_.size()); }

    /// Routes to ensemble member `index` (0..K-1) or the reflective backend
    /// (kReflectiveIndex) and appends the call to the log.
    CompletionResponse complete(int index, const CompletionRequest& request);

    const std::string& backend_name(int index) const;
    double proposal_temperature(int index) const;

    const prompts::TemplateSet& templates() const { return templates_; }
    const GenOptions& options() const { return options_; }
    CallLog& log() { return log_; }
    const CallLog& log() const { return log_; }

    int next_thought_id() { return next_thought_id_++; }

private:
    std::vector<std::unique_ptr<Backend>> ensemble_;
    std::unique_ptr<Backend> reflective_;
    prompts::TemplateSet templates_;
    GenOptions options_;
    CallLog log_;
    std::atomic<int> next_thought_id_{0};
};

/// Task text plus the previous step's final thought, as consumed by the
/// pipeline stages at one step.
struct StepInput {
    int step = 1;
    std::string task_text;             // rendered step prompt (demonstrations included)
    std::optional<Thought> prior;      // final thought of step t-1, if any
};

}  // namespace tandem
