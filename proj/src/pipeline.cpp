#include "tandem/pipeline.hpp"

#include "tandem/system1.hpp"
#include "tandem/system2.hpp"

namespace tandem::pipeline {

using nlohmann::json;

Transcript run(Engine& engine, const tasks::TaskSpec& task,
               const tasks::TaskInstance& instance, const RunSettings& settings) {
    Transcript transcript;
    transcript.run_id =
        settings.run_id.empty() ? task.id + "-" + instance.id : settings.run_id;
    transcript.task_id = task.id;
    transcript.instance_id = instance.id;
    transcript.instance_payload = instance.payload;
    transcript.instance_gold = instance.gold;

    evaluator::ThresholdState threshold = settings.threshold;
    std::optional<Thought> prior;

    for (int step = 1; step <= task.steps; ++step) {
        try {
            const auto& tmpl = engine.templates().get(task.id, prompts::Role::Step, step);
            StepInput input{step, prompts::render(tmpl, tasks::step_bindings(task, instance, step)),
                            prior};

            StepRecord record;
            record.step = step;
            record.threshold_at_step = threshold.current();

            record.thoughts = system1::run(engine, input);
            record.scores = evaluator::cross_evaluate(engine, input, record.thoughts);
            auto [best, best_score] = evaluator::select_best(record.thoughts, record.scores);
            record.signal = evaluator::make_signal(best, best_score, threshold);

            if (record.signal.intervene) {
                record.final_thought = system2::intervene(engine, input, best);
            } else {
                record.final_thought = best;
                evaluator::advance_threshold(threshold);
            }

            for (Phase phase : {Phase::Initial, Phase::Interact, Phase::Update,
                                Phase::Evaluate, Phase::Intervene}) {
                Usage usage = engine.log().total(phase, step);
                if (usage.input_tokens > 0 || usage.output_tokens > 0) {
                    record.usage_by_phase[phase] = usage;
                }
            }

            prior = record.final_thought;
            transcript.steps.push_back(std::move(record));
        } catch (const std::exception& e) {
            // engine errors and malformed-payload JSON errors alike leave a
            // partial transcript; spend so far stays accounted
            transcript.complete = false;
            transcript.error = "step " + std::to_string(step) + ": " + e.what();
            break;
        }
    }

    if (prior) transcript.answer = prior->text;
    transcript.totals_by_backend = engine.log().totals_by_backend();
    transcript.calls = engine.log().snapshot();
    return transcript;
}

double intervention_rate(const Transcript& transcript) {
    if (transcript.steps.empty()) {
        throw ValidationError("intervention rate undefined: transcript has no steps");
    }
    std::size_t fired = 0;
    for (const auto& step : transcript.steps) {
        if (step.signal.intervene) ++fired;
    }
    return static_cast<double>(fired) / static_cast<double>(transcript.steps.size());
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

namespace {

json thought_to_json(const Thought& thought) {
    return json{{"author", thought.author},
                {"role", to_string(thought.role)},
                {"text", thought.text}};
}

json usage_to_json(const Usage& usage) {
    return json{{"in", usage.input_tokens}, {"out", usage.output_tokens}};
}

ThoughtRole role_from(const std::string& name) {
    if (name == "initial") return ThoughtRole::Initial;
    if (name == "feedback") return ThoughtRole::Feedback;
    if (name == "intervened") return ThoughtRole::Intervened;
    return ThoughtRole::Updated;
}

}  // namespace

json to_json(const Transcript& transcript) {
    json steps = json::array();
    for (const auto& record : transcript.steps) {
        json thoughts = json::array();
        for (const auto& thought : record.thoughts.members) {
            thoughts.push_back(thought_to_json(thought));
        }
        json scores = json::array();
        for (const auto& score : record.scores) {
            scores.push_back(json{{"author", score.author},
                                  {"value", score.value},
                                  {"raters", score.rater_values}});
        }
        json usage = json::object();
        for (const auto& [phase, totals] : record.usage_by_phase) {
            usage[to_string(phase)] = usage_to_json(totals);
        }
        steps.push_back(json{
            {"step", record.step},
            {"thoughts", std::move(thoughts)},
            {"scores", std::move(scores)},
            {"signal", json{{"intervene", record.signal.intervene},
                            {"best", record.signal.best_author},
                            {"threshold", record.signal.threshold_used}}},
            {"final", thought_to_json(record.final_thought)},
            {"usage", std::move(usage)},
        });
    }

    json totals = json::object();
    for (const auto& [backend, usage] : transcript.totals_by_backend) {
        totals[backend] = usage_to_json(usage);
    }

    json calls = json::array();
    for (const auto& call : transcript.calls) {
        calls.push_back(json{{"backend", call.backend_name},
                             {"index", call.backend_index},
                             {"phase", to_string(call.phase)},
                             {"step", call.step},
                             {"in", call.usage.input_tokens},
                             {"out", call.usage.output_tokens}});
    }

    json doc{
        {"run_id", transcript.run_id},
        {"task", transcript.task_id},
        {"config", transcript.config_snapshot},
        {"instance", json{{"id", transcript.instance_id},
                          {"payload", transcript.instance_payload},
                          {"gold", transcript.instance_gold}}},
        {"steps", std::move(steps)},
        {"answer", transcript.answer},
        {"totals", std::move(totals)},
        {"calls", std::move(calls)},
    };
    if (!transcript.complete) {
        doc["complete"] = false;
        doc["error"] = transcript.error;
    }
    return doc;
}

Transcript transcript_from_json(const json& doc) {
    Transcript transcript;
    transcript.run_id = doc.at("run_id").get<std::string>();
    transcript.task_id = doc.at("task").get<std::string>();
    transcript.config_snapshot = doc.value("config", json::object());
    if (doc.contains("instance")) {
        const json& instance = doc["instance"];
        transcript.instance_id = instance.value("id", std::string{});
        transcript.instance_payload = instance.value("payload", json());
        transcript.instance_gold = instance.value("gold", json());
    }
    transcript.answer = doc.value("answer", std::string{});
    transcript.complete = doc.value("complete", true);
    transcript.error = doc.value("error", std::string{});

    for (const auto& step_doc : doc.value("steps", json::array())) {
        StepRecord record;
        record.step = step_doc.at("step").get<int>();
        record.thoughts.step = record.step;
        for (const auto& thought_doc : step_doc.value("thoughts", json::array())) {
            Thought thought;
            thought.author = thought_doc.at("author").get<int>();
            thought.step = record.step;
            thought.role = role_from(thought_doc.at("role").get<std::string>());
            thought.text = thought_doc.at("text").get<std::string>();
            record.thoughts.members.push_back(std::move(thought));
        }
        for (const auto& score_doc : step_doc.value("scores", json::array())) {
            evaluator::ConfidenceScore score;
            score.author = score_doc.at("author").get<int>();
            score.value = score_doc.at("value").get<double>();
            score.rater_values = score_doc.value("raters", std::vector<double>{});
            record.scores.push_back(std::move(score));
        }
        const json& signal = step_doc.at("signal");
        record.signal.intervene = signal.at("intervene").get<bool>();
        record.signal.best_author = signal.at("best").get<int>();
        record.signal.threshold_used = signal.at("threshold").get<double>();
        record.threshold_at_step = record.signal.threshold_used;
        for (const auto& score : record.scores) {
            if (score.author == record.signal.best_author) {
                record.signal.best_score = score.value;
            }
        }
        if (step_doc.contains("final")) {
            const json& final_doc = step_doc["final"];
            record.final_thought.author = final_doc.at("author").get<int>();
            record.final_thought.step = record.step;
            record.final_thought.role = role_from(final_doc.at("role").get<std::string>());
            record.final_thought.text = final_doc.at("text").get<std::string>();
        }
        if (step_doc.contains("usage") && step_doc["usage"].is_object()) {
            for (const auto& [phase_name, usage_doc] : step_doc["usage"].items()) {
                auto phase = phase_from_string(phase_name);
                if (!phase) continue;
                record.usage_by_phase[*phase] = Usage{usage_doc.at("in").get<std::int64_t>(),
                                                      usage_doc.at("out").get<std::int64_t>()};
            }
        }
        transcript.steps.push_back(std::move(record));
    }

    if (doc.contains("totals") && doc["totals"].is_object()) {
        for (const auto& [backend, usage_doc] : doc["totals"].items()) {
            transcript.totals_by_backend[backend] = Usage{usage_doc.at("in").get<std::int64_t>(),
                                                          usage_doc.at("out").get<std::int64_t>()};
        }
    }
    for (const auto& call_doc : doc.value("calls", json::array())) {
        CallRecord call;
        call.backend_name = call_doc.at("backend").get<std::string>();
        call.backend_index = call_doc.value("index", 0);
        call.phase = phase_from_string(call_doc.at("phase").get<std::string>())
                         .value_or(Phase::Initial);
        call.step = call_doc.value("step", 0);
        call.usage = Usage{call_doc.at("in").get<std::int64_t>(),
                           call_doc.at("out").get<std::int64_t>()};
        transcript.calls.push_back(std::move(call));
    }
    return transcript;
}

}  // namespace tandem::pipeline
