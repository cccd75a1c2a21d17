#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace tandem::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitRuntime = 3;

struct RunArgs {
    std::string config_path;
    std::string instances_path;
    std::string out_dir;    // empty: config's out_dir
    long limit = -1;        // <0: all instances
    int width = 0;          // <=0: config's width
    std::uint64_t seed = 0; // reserved for sampling; scripted runs ignore it
};

struct ReportArgs {
    std::string transcripts_dir;
    std::string out_dir;  // empty: same as transcripts_dir
};

struct FeasibilityArgs {
    std::string config_path;
    std::optional<double> empirical_rate;  // compare against the bound
};

struct SimulateArgs {
    int ensemble_size = 3;   // K
    int demonstrations = 1;  // M
    double unit_cost_small = 0.0;
    double unit_cost_large = 0.0;
    long trials = 100000;
    std::uint64_t seed = 0;
    int points = 101;  // sweep resolution over [0, 1]
    std::string out_path = "synergy.csv";
};

/// One transcript JSON per instance plus summary.csv
/// (instance,score,intervention_rate,dollars,tflops). Validation runs to
/// completion before any backend is built, so a bad config costs zero calls.
int cmd_run(const RunArgs& args, std::ostream& out, std::ostream& err);

/// Aggregated cost/metric report over a directory of transcripts, as
/// report.csv (per run: run_id,dollars_total,tflops_total,intervention_rate,
/// then per-backend dollars) and report.json (aggregates).
int cmd_report(const ReportArgs& args, std::ostream& out, std::ostream& err);

/// Prints the feasibility bound on the intervention rate for the configured
/// ensemble, and whether a supplied empirical rate stays cost-saving.
int cmd_feasibility(const FeasibilityArgs& args, std::ostream& out, std::ostream& err);

/// Monte-Carlo cost sweep, written as CSV (r,mean_cost,baseline).
int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tandem::cli
