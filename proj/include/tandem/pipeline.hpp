#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "tandem/engine.hpp"
#include "tandem/evaluator.hpp"
#include "tandem/tasks.hpp"
#include "tandem/thought.hpp"

namespace tandem::pipeline {

/// Audit trail of one reasoning step: the refined intuitions, their scores,
/// the gate decision, and the thought that went forward.
struct StepRecord {
    int step = 1;
    ThoughtSet thoughts;
    std::vector<evaluator::ConfidenceScore> scores;
    evaluator::InterventionSignal signal;
    Thought final_thought;  // intervened thought iff signal.intervene
    double threshold_at_step = 0.0;
    std::map<Phase, Usage> usage_by_phase;
};

struct Transcript {
    std::string run_id;
    std::string task_id;
    nlohmann::json config_snapshot;
    std::string instance_id;
    nlohmann::json instance_payload;
    nlohmann::json instance_gold;
    std::vector<StepRecord> steps;
    std::string answer;  // final thought text of the last step
    std::map<std::string, Usage> totals_by_backend;
    std::vector<CallRecord> calls;
    bool complete = true;
    std::string error;  // set when complete == false
};

struct RunSettings {
    std::string run_id;  // empty: derived as "<task>-<instance>"
    evaluator::ThresholdState threshold;  // reset per instance
};

/// Drives the task's N steps: intuition stage, cross-evaluation, confidence
/// gate, and reflective intervention when the gate fires. A step failure
/// yields a partial transcript flagged incomplete rather than a throw, so
/// failed spend still gets accounted.
Transcript run(Engine& engine, const tasks::TaskSpec& task,
               const tasks::TaskInstance& instance, const RunSettings& settings);

/// Fired steps / total steps. Empty transcripts have no defined rate.
double intervention_rate(const Transcript& transcript);

/// Fixed persistence schema. Token counts are integers; no monetary values.
nlohmann::json to_json(const Transcript& transcript);
Transcript transcript_from_json(const nlohmann::json& doc);

}  // namespace tandem::pipeline
