#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tandem/engine.hpp"
#include "tandem/thought.hpp"

namespace tandem::evaluator {

/// Confidence of one thought: the arithmetic mean of its per-rater values,
/// all in [0, 5].
struct ConfidenceScore {
    int thought_id = 0;
    int author = 0;                    // author of the scored thought
    double value = 0.0;                // mean of rater_values (0 when none)
    std::vector<double> rater_values;  // one entry per rater, clamped to [0, 5]
};

/// Rising acceptance threshold. current() = min(base * (1+growth)^accepted, cap)
/// in the default multiplicative mode; the additive alternative adds
/// base*growth per accepted step. accepted_steps advances only on accepted
/// (non-intervened) steps and resets per problem instance.
struct ThresholdState {
    enum class Growth { Multiplicative, Additive };

    double base = 3.5;
    double growth = 0.10;
    double cap = 5.0;
    Growth mode = Growth::Multiplicative;
    int accepted_steps = 0;

    double current() const;
};

/// Outcome of the confidence gate for one step.
/// intervene == (best_score <= threshold_used): acceptance needs a strictly
/// higher score than the threshold.
struct InterventionSignal {
    bool intervene = false;
    int best_thought_id = 0;
    int best_author = 0;
    double best_score = 0.0;
    double threshold_used = 0.0;
};

/// Extracts the first decimal number from rater output and clamps it to
/// [0, 5]. No number means parse failure.
std::optional<double> parse_score(std::string_view rater_text);

/// Cross-evaluation: every thought is scored by each other ensemble member
/// (self excluded by default; include_self_evaluation adds the author as a
/// rater). K(K-1) calls tagged "evaluate" in the default mode. One retry per
/// unparseable rater value, then 0. K == 1 without self-rating yields the
/// sentinel score 0, pushing the decision onto the threshold.
std::vector<ConfidenceScore> cross_evaluate(Engine& engine, const StepInput& input,
                                            const ThoughtSet& thoughts);

/// Argmax by score value; ties break toward the lowest author index.
std::pair<Thought, ConfidenceScore> select_best(const ThoughtSet& thoughts,
                                                const std::vector<ConfidenceScore>& scores);

InterventionSignal make_signal(const Thought& best, const ConfidenceScore& score,
                               const ThresholdState& state);

/// Convenience overload used by tests mirroring the gate rule alone.
bool intervention_fires(double best_score, const ThresholdState& state);

/// Call after an accepted step only.
void advance_threshold(ThresholdState& state);

}  // namespace tandem::evaluator
