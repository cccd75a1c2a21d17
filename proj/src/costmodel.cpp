#include "tandem/costmodel.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace tandem::costmodel {

PriceTable default_price_table() {
    return PriceTable{
        {"GPT-3.5", {1.5, 2.0}},
        {"GPT-4", {30.0, 60.0}},
        {"Yi-34B", {0.35, 0.35}},
        {"Gemini1pro", {0.5, 1.5}},
        {"Mistral-7B", {0.25, 0.25}},
        {"LLaMA-13B", {0.28, 0.28}},
        {"PaLM2", {0.0, 0.0}},
    };
}

double blended_price(const PriceEntry& entry) {
    return (entry.input_per_million + entry.output_per_million) / 2.0;
}

CostReport actual_cost(const pipeline::Transcript& transcript, const PriceTable& prices) {
    CostReport report;
    for (const auto& call : transcript.calls) {
        auto it = prices.find(call.backend_name);
        if (it == prices.end()) {
            throw CoverageError(call.backend_name, "no price entry");
        }
        double dollars = (static_cast<double>(call.usage.input_tokens) *
                              it->second.input_per_million +
                          static_cast<double>(call.usage.output_tokens) *
                              it->second.output_per_million) /
                         1e6;
        report.dollars_total += dollars;
        report.dollars_by_backend[call.backend_name] += dollars;
        report.dollars_by_phase[to_string(call.phase)] += dollars;
    }
    if (!transcript.steps.empty()) {
        report.intervention_rate = pipeline::intervention_rate(transcript);
    }
    return report;
}

double estimate_flops(const pipeline::Transcript& transcript, const ParamTable& params) {
    double flops = 0.0;
    for (const auto& call : transcript.calls) {
        auto it = params.find(call.backend_name);
        if (it == params.end()) {
            throw CoverageError(call.backend_name, "no parameter count");
        }
        flops += 2.0 * it->second * static_cast<double>(call.usage.total());
    }
    return flops / 1e12;
}

CostReport build_report(const pipeline::Transcript& transcript, const PriceTable& prices,
                        const ParamTable& params) {
    CostReport report = actual_cost(transcript, prices);
    bool covered = true;
    for (const auto& call : transcript.calls) {
        if (params.find(call.backend_name) == params.end()) {
            covered = false;
            break;
        }
    }
    if (covered) {
        report.tflops_total = estimate_flops(transcript, params);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Theoretical cost model
// ---------------------------------------------------------------------------

double theoretical_system1_cost(int demonstrations, int ensemble_size, double unit_cost) {
    if (ensemble_size < 1) throw ValidationError("ensemble size must be >= 1");
    if (demonstrations < 0) throw ValidationError("demonstration count must be >= 0");
    return static_cast<double>((demonstrations + 2 * ensemble_size - 2) * ensemble_size) *
           unit_cost;
}

double theoretical_eval_cost(int ensemble_size, double unit_cost) {
    if (ensemble_size < 1) throw ValidationError("ensemble size must be >= 1");
    return static_cast<double>((ensemble_size - 1) * ensemble_size) * unit_cost;
}

double expected_pipeline_cost(const SynergyParams& params) {
    return theoretical_system1_cost(params.demonstrations, params.ensemble_size,
                                    params.unit_cost_small) +
           theoretical_eval_cost(params.ensemble_size, params.unit_cost_small) +
           params.intervention_rate * params.unit_cost_large;
}

double feasible_intervention_rate(int ensemble_size, double unit_cost_small,
                                  double unit_cost_large, int demonstrations) {
    if (unit_cost_large <= 0.0) {
        throw ValidationError("feasibility bound requires a positive large-model cost");
    }
    if (demonstrations < 1) {
        throw ValidationError(
            "feasibility bound is defined for demonstrations >= 1: the pure "
            "large-model baseline is zero otherwise");
    }
    if (ensemble_size < 1) throw ValidationError("ensemble size must be >= 1");
    const double per_step =
        theoretical_system1_cost(demonstrations, ensemble_size, unit_cost_small) +
        theoretical_eval_cost(ensemble_size, unit_cost_small);
    return 1.0 - per_step / (static_cast<double>(demonstrations) * unit_cost_large);
}

// ---------------------------------------------------------------------------
// Simulator
// ---------------------------------------------------------------------------

SynergyCurve simulate_synergy(const SynergyParams& params, std::span<const double> sweep,
                              long trials, std::uint64_t seed) {
    if (trials < 1) throw ValidationError("simulate_synergy requires trials >= 1");

    // One uniform per trial, shared across the whole sweep. Fixed partition
    // count so the stream is identical regardless of available workers.
    constexpr int kPartitions = 8;
    std::vector<double> draws;
    draws.reserve(static_cast<std::size_t>(trials));
    const long chunk = (trials + kPartitions - 1) / kPartitions;
    for (int partition = 0; partition < kPartitions; ++partition) {
        const long begin = partition * chunk;
        const long end = std::min(trials, begin + chunk);
        if (begin >= end) break;
        std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(partition + 1));
        std::uniform_real_distribution<double> uniform(0.0, 1.0);
        for (long i = begin; i < end; ++i) draws.push_back(uniform(rng));
    }
    std::sort(draws.begin(), draws.end());

    const double base_cost =
        theoretical_system1_cost(params.demonstrations, params.ensemble_size,
                                 params.unit_cost_small) +
        theoretical_eval_cost(params.ensemble_size, params.unit_cost_small);

    SynergyCurve curve;
    curve.baseline = static_cast<double>(params.demonstrations) * params.unit_cost_large;

    for (double rate : sweep) {
        // draws sorted ascending: interventions fired = #draws < rate
        auto fired = std::lower_bound(draws.begin(), draws.end(), rate) - draws.begin();
        double empirical_rate =
            static_cast<double>(fired) / static_cast<double>(trials);
        curve.points.push_back(
            SynergyPoint{rate, base_cost + empirical_rate * params.unit_cost_large});
    }

    // Break-even: first sweep point whose mean cost reaches the baseline,
    // linearly interpolated from the previous point.
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        if (curve.points[i].mean_cost < curve.baseline) continue;
        if (i == 0) {
            curve.break_even = curve.points[0].rate;
        } else {
            const auto& lo = curve.points[i - 1];
            const auto& hi = curve.points[i];
            const double span = hi.mean_cost - lo.mean_cost;
            const double t = span > 0.0 ? (curve.baseline - lo.mean_cost) / span : 0.0;
            curve.break_even = lo.rate + t * (hi.rate - lo.rate);
        }
        break;
    }
    return curve;
}

}  // namespace tandem::costmodel
