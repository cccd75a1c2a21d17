#include "tandem/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace tandem::evaluator {

double ThresholdState::current() const {
    double value = 0.0;
    if (mode == Growth::Multiplicative) {
        value = base * std::pow(1.0 + growth, accepted_steps);
    } else {
        value = base + base * growth * accepted_steps;
    }
    return std::min(value, cap);
}

void advance_threshold(ThresholdState& state) {
    ++state.accepted_steps;
}

std::optional<double> parse_score(std::string_view rater_text) {
    const char* p = rater_text.data();
    const char* end = p + rater_text.size();
    while (p < end) {
        char c = *p;
        bool starts_number = (c >= '0' && c <= '9');
        if (!starts_number && (c == '-' || c == '+' || c == '.') && p + 1 < end &&
            p[1] >= '0' && p[1] <= '9') {
            starts_number = true;
        }
        if (starts_number) {
            // strtod needs a terminated buffer; copy the candidate region
            std::string candidate(p, end);
            char* after = nullptr;
            double value = std::strtod(candidate.c_str(), &after);
            if (after != candidate.c_str()) {
                return std::clamp(value, 0.0, 5.0);
            }
        }
        ++p;
    }
    return std::nullopt;
}

std::vector<ConfidenceScore> cross_evaluate(Engine& engine, const StepInput& input,
                                            const ThoughtSet& thoughts) {
    const int k = engine.ensemble_size();
    if (thoughts.members.empty() || static_cast<int>(thoughts.members.size()) != k) {
        throw ValidationError("cross_evaluate: thought set size must equal ensemble size");
    }

    const bool include_self = engine.options().include_self_evaluation;
    const auto& tmpl = engine.templates().get("default", prompts::Role::Evaluate);

    std::vector<ConfidenceScore> scores;
    scores.reserve(thoughts.members.size());
    for (const Thought& thought : thoughts.members) {
        ConfidenceScore score{thought.id, thought.author, 0.0, {}};
        for (int rater = 0; rater < k; ++rater) {
            if (rater == thought.author && !include_self) continue;
            std::string prompt = prompts::render(
                tmpl, {{"task", input.task_text}, {"thought", thought.text}});
            CompletionRequest request{prompt, engine.options().max_output,
                                      engine.options().refine_temperature, input.step,
                                      Phase::Evaluate};
            auto value = parse_score(engine.complete(rater, request).text);
            if (!value) {
                // one retry, then the thought is treated as unevaluable by this rater
                value = parse_score(engine.complete(rater, request).text);
            }
            score.rater_values.push_back(value.value_or(0.0));
        }
        if (!score.rater_values.empty()) {
            double sum = 0.0;
            for (double v : score.rater_values) sum += v;
            score.value = sum / static_cast<double>(score.rater_values.size());
        }
        scores.push_back(std::move(score));
    }
    return scores;
}

std::pair<Thought, ConfidenceScore> select_best(const ThoughtSet& thoughts,
                                                const std::vector<ConfidenceScore>& scores) {
    if (thoughts.members.empty() || thoughts.members.size() != scores.size()) {
        throw ValidationError("select_best: scores must cover the thought set");
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
        if (scores[i].value > scores[best].value) best = i;
    }
    return {thoughts.members[best], scores[best]};
}

bool intervention_fires(double best_score, const ThresholdState& state) {
    return !(best_score > state.current());
}

InterventionSignal make_signal(const Thought& best, const ConfidenceScore& score,
                               const ThresholdState& state) {
    InterventionSignal signal;
    signal.best_thought_id = best.id;
    signal.best_author = best.author;
    signal.best_score = score.value;
    signal.threshold_used = state.current();
    signal.intervene = intervention_fires(score.value, state);
    return signal;
}

}  // namespace tandem::evaluator
