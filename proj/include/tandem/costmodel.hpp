#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tandem/backend.hpp"
#include "tandem/pipeline.hpp"

namespace tandem::costmodel {

/// Per-model prices in dollars per million tokens, keyed by backend name.
using PriceTable = std::map<std::string, PriceEntry>;

/// The price table shipped with the tool (dollars per 1M tokens).
PriceTable default_price_table();

/// Estimated parameter counts, keyed by backend name. Callers must supply
/// counts for closed models; FLOPs are never guessed.
using ParamTable = std::map<std::string, double>;

struct CostReport {
    double dollars_total = 0.0;
    std::map<std::string, double> dollars_by_backend;
    std::map<std::string, double> dollars_by_phase;
    std::optional<double> tflops_total;
    double intervention_rate = 0.0;
};

/// Prices every call of the transcript: (in * in_price + out * out_price)/1e6,
/// broken down by backend and by phase. Throws CoverageError on a backend with
/// no price entry.
CostReport actual_cost(const pipeline::Transcript& transcript, const PriceTable& prices);

/// Forward-pass FLOPs estimate, 2 * params * (in + out) per call, in TFLOPs.
/// Throws CoverageError on a backend with no parameter count.
double estimate_flops(const pipeline::Transcript& transcript, const ParamTable& params);

/// actual_cost plus the FLOPs estimate when every backend has a param count.
CostReport build_report(const pipeline::Transcript& transcript, const PriceTable& prices,
                        const ParamTable& params);

/// (input + output) / 2: the single per-token price the theoretical model
/// works in.
double blended_price(const PriceEntry& entry);

// ---------------------------------------------------------------------------
// Theoretical cost model
// ---------------------------------------------------------------------------

/// Intuition-stage cost for one step: (M + 2K - 2) * K * unit_cost.
double theoretical_system1_cost(int demonstrations, int ensemble_size, double unit_cost);

/// Cross-evaluation cost for one step: (K - 1) * K * unit_cost.
double theoretical_eval_cost(int ensemble_size, double unit_cost);

struct SynergyParams {
    int ensemble_size = 3;        // K
    int demonstrations = 1;       // M
    double unit_cost_small = 0.0; // C_I, per demonstration-equivalent call
    double unit_cost_large = 0.0; // C_R
    double intervention_rate = 0.0;
};

/// Expected per-step cost of the dual pipeline:
/// system1 + evaluation + rate * unit_cost_large.
double expected_pipeline_cost(const SynergyParams& params);

/// Largest intervention rate at which the dual pipeline still beats reasoning
/// with the large model alone:
///   1 - ((M + 2K - 2)K + (K - 1)K) * C_I / (M * C_R).
/// Negative results mean no rate saves cost. Defined for M >= 1 only (the
/// M = 0 baseline cost degenerates to zero).
double feasible_intervention_rate(int ensemble_size, double unit_cost_small,
                                  double unit_cost_large, int demonstrations = 1);

// ---------------------------------------------------------------------------
// Monte-Carlo synergy simulator
// ---------------------------------------------------------------------------

struct SynergyPoint {
    double rate = 0.0;
    double mean_cost = 0.0;
};

struct SynergyCurve {
    std::vector<SynergyPoint> points;     // one per swept rate, in sweep order
    double baseline = 0.0;                // M * C_R
    std::optional<double> break_even;     // rate where mean cost crosses baseline
};

/// Per trial, one uniform draw decides intervention for every swept rate
/// (common random numbers), so the mean-cost curve is exactly monotone in the
/// rate. Trials are generated in fixed partitions with derived seeds and
/// reduced in partition order; results depend only on (params, sweep, trials,
/// seed).
SynergyCurve simulate_synergy(const SynergyParams& params, std::span<const double> sweep,
                              long trials, std::uint64_t seed);

}  // namespace tandem::costmodel
