#include "tandem/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tandem/config.hpp"
#include "tandem/costmodel.hpp"
#include "tandem/pipeline.hpp"

namespace tandem::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.10g", value);
    return buffer;
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

struct InstanceResult {
    std::string instance_id;
    std::optional<double> score;
    std::optional<int> diversity;
    std::optional<double> intervention_rate;
    double dollars = 0.0;
    std::optional<double> tflops;
    bool complete = false;
    std::string error;
};

InstanceResult run_one(const config::LoadedConfig& loaded, const tasks::TaskInstance& instance,
                       const fs::path& out_dir) {
    InstanceResult result;
    result.instance_id = instance.id;
    try {
        Engine engine = config::make_engine(loaded);
        pipeline::RunSettings settings;
        settings.threshold = config::make_threshold(loaded.run);

        pipeline::Transcript transcript = pipeline::run(engine, loaded.task, instance, settings);
        transcript.config_snapshot = loaded.run.raw;

        write_text_file(out_dir / (transcript.run_id + ".json"),
                        pipeline::to_json(transcript).dump(2) + "\n");

        costmodel::CostReport report =
            costmodel::build_report(transcript, loaded.prices, loaded.params);
        result.dollars = report.dollars_total;
        result.tflops = report.tflops_total;
        if (!transcript.steps.empty()) {
            result.intervention_rate = pipeline::intervention_rate(transcript);
        }
        result.complete = transcript.complete;
        result.error = transcript.error;

        if (transcript.complete) {
            tasks::EvalOutcome outcome =
                tasks::score_answer(loaded.task, instance, transcript.answer);
            result.score = outcome.score;
            result.diversity = outcome.diversity;
        }
    } catch (const std::exception& e) {
        result.complete = false;
        result.error = e.what();
    }
    return result;
}

/// Price/param tables recovered from a transcript's config snapshot, with the
/// shipped table as fallback. Lenient on purpose: reporting must work even
/// when the original script files are gone.
void tables_from_snapshot(const json& snapshot, costmodel::PriceTable& prices,
                          costmodel::ParamTable& params) {
    prices = costmodel::default_price_table();
    auto absorb = [&](const json& entry) {
        if (!entry.is_object() || !entry.contains("name")) return;
        const std::string name = entry["name"].get<std::string>();
        if (entry.contains("price") && entry["price"].is_object()) {
            prices[name] = PriceEntry{entry["price"].value("input_per_million", 0.0),
                                      entry["price"].value("output_per_million", 0.0)};
        }
        if (entry.contains("param_count")) {
            params[name] = entry["param_count"].get<double>();
        }
    };
    if (snapshot.contains("system1") && snapshot["system1"].is_array()) {
        for (const auto& entry : snapshot["system1"]) absorb(entry);
    }
    if (snapshot.contains("system2")) absorb(snapshot["system2"]);
}

}  // namespace

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

int cmd_run(const RunArgs& args, std::ostream& out, std::ostream& err) {
    config::LoadedConfig loaded;
    std::vector<tasks::TaskInstance> instances;
    try {
        loaded = config::load_config(args.config_path);
        instances = tasks::load_instances(args.instances_path);
    } catch (const ValidationError& e) {
        err << e.what() << "\n";
        return kExitValidation;
    }

    if (args.limit >= 0 && static_cast<std::size_t>(args.limit) < instances.size()) {
        instances.resize(static_cast<std::size_t>(args.limit));
    }
    if (instances.empty()) {
        err << "no instances to run\n";
        return kExitValidation;
    }

    const fs::path out_dir = args.out_dir.empty() ? loaded.run.out_dir : args.out_dir;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        err << "cannot create output directory " << out_dir << ": " << ec.message() << "\n";
        return kExitRuntime;
    }

    const int width = std::max(1, args.width > 0 ? args.width : loaded.run.width);
    std::vector<InstanceResult> results(instances.size());
    std::atomic<std::size_t> cursor{0};
    auto worker = [&] {
        while (true) {
            const std::size_t index = cursor.fetch_add(1);
            if (index >= instances.size()) break;
            results[index] = run_one(loaded, instances[index], out_dir);
        }
    };
    if (width == 1 || instances.size() == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        const int threads = std::min<std::size_t>(width, instances.size());
        for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
        worker();
        for (auto& thread : pool) thread.join();
    }

    std::string csv = "instance,score,intervention_rate,dollars,tflops\n";
    bool any_failed = false;
    for (const auto& result : results) {
        csv += result.instance_id;
        csv += ',';
        if (result.score) csv += fmt(*result.score);
        csv += ',';
        if (result.intervention_rate) csv += fmt(*result.intervention_rate);
        csv += ',';
        csv += fmt(result.dollars);
        csv += ',';
        if (result.tflops) csv += fmt(*result.tflops);
        csv += '\n';
        if (!result.complete) {
            any_failed = true;
            err << result.instance_id << ": " << result.error << "\n";
        }
    }
    write_text_file(out_dir / "summary.csv", csv);

    out << "ran " << results.size() << " instance(s), wrote " << out_dir.string()
        << "/summary.csv\n";
    return any_failed ? kExitRuntime : kExitOk;
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

int cmd_report(const ReportArgs& args, std::ostream& out, std::ostream& err) {
    std::vector<pipeline::Transcript> transcripts;
    if (!fs::is_directory(args.transcripts_dir)) {
        err << "not a directory: " << args.transcripts_dir << "\n";
        return kExitValidation;
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(args.transcripts_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
        std::ifstream in(file);
        json doc;
        try {
            doc = json::parse(in);
        } catch (const json::exception&) {
            continue;  // not a transcript
        }
        if (!doc.is_object() || !doc.contains("run_id") || !doc.contains("task")) continue;
        transcripts.push_back(pipeline::transcript_from_json(doc));
    }
    if (transcripts.empty()) {
        err << "no transcripts in " << args.transcripts_dir << "\n";
        return kExitValidation;
    }
    std::set<std::string> task_ids;
    for (const auto& transcript : transcripts) task_ids.insert(transcript.task_id);
    if (task_ids.size() > 1) {
        err << "mixed-task directory (";
        bool first = true;
        for (const auto& id : task_ids) {
            if (!first) err << ", ";
            err << id;
            first = false;
        }
        err << "); report one task at a time\n";
        return kExitValidation;
    }

    const tasks::TaskSpec task = tasks::make_task(*task_ids.begin());
    std::set<std::string> backend_names;
    struct Row {
        std::string run_id;
        costmodel::CostReport report;
        std::optional<double> score;
        std::optional<int> diversity;
        std::optional<double> rate;
    };
    std::vector<Row> rows;
    for (const auto& transcript : transcripts) {
        costmodel::PriceTable prices;
        costmodel::ParamTable params;
        tables_from_snapshot(transcript.config_snapshot, prices, params);

        Row row;
        row.run_id = transcript.run_id;
        try {
            row.report = costmodel::build_report(transcript, prices, params);
        } catch (const CoverageError& e) {
            err << transcript.run_id << ": " << e.what() << "\n";
            return kExitRuntime;
        }
        if (!transcript.steps.empty()) row.rate = pipeline::intervention_rate(transcript);
        if (transcript.complete) {
            tasks::TaskInstance instance{transcript.instance_id, transcript.instance_payload,
                                         transcript.instance_gold};
            try {
                tasks::EvalOutcome outcome =
                    tasks::score_answer(task, instance, transcript.answer);
                row.score = outcome.score;
                row.diversity = outcome.diversity;
            } catch (const Error&) {
                // transcript lacks the payload fields this task grades by;
                // leave the metric cells empty
            }
        }
        for (const auto& [name, dollars] : row.report.dollars_by_backend) {
            backend_names.insert(name);
        }
        rows.push_back(std::move(row));
    }

    // per-run CSV
    std::string csv = "run_id,dollars_total,tflops_total,intervention_rate";
    for (const auto& name : backend_names) csv += ",dollars[" + name + "]";
    csv += '\n';
    for (const auto& row : rows) {
        csv += row.run_id + ',' + fmt(row.report.dollars_total) + ',';
        if (row.report.tflops_total) csv += fmt(*row.report.tflops_total);
        csv += ',';
        if (row.rate) csv += fmt(*row.rate);
        for (const auto& name : backend_names) {
            csv += ',';
            auto it = row.report.dollars_by_backend.find(name);
            if (it != row.report.dollars_by_backend.end()) csv += fmt(it->second);
        }
        csv += '\n';
    }

    // aggregates
    json aggregate{{"task", task.id}, {"transcripts", rows.size()}};
    double dollars = 0.0;
    int scored = 0;
    double score_sum = 0.0;
    int diversity_count = 0;
    double diversity_sum = 0.0;
    int rated = 0;
    double rate_sum = 0.0;
    bool all_tflops = true;
    double tflops_sum = 0.0;
    for (const auto& row : rows) {
        dollars += row.report.dollars_total;
        if (row.score) {
            ++scored;
            score_sum += *row.score;
        }
        if (row.diversity) {
            ++diversity_count;
            diversity_sum += *row.diversity;
        }
        if (row.rate) {
            ++rated;
            rate_sum += *row.rate;
        }
        if (row.report.tflops_total) {
            tflops_sum += *row.report.tflops_total;
        } else {
            all_tflops = false;
        }
    }
    const double n = static_cast<double>(rows.size());
    aggregate["mean_dollars"] = dollars / n;
    aggregate["scored"] = scored;
    if (scored > 0) aggregate["accuracy"] = score_sum / scored;
    if (diversity_count > 0) aggregate["diversity"] = diversity_sum / diversity_count;
    if (rated > 0) aggregate["mean_intervention_rate"] = rate_sum / rated;
    if (all_tflops) aggregate["mean_tflops"] = tflops_sum / n;

    const fs::path out_dir = args.out_dir.empty() ? args.transcripts_dir : args.out_dir;
    fs::create_directories(out_dir);
    write_text_file(out_dir / "report.csv", csv);
    write_text_file(out_dir / "report.json", aggregate.dump(2) + "\n");

    out << aggregate.dump(2) << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// feasibility
// ---------------------------------------------------------------------------

int cmd_feasibility(const FeasibilityArgs& args, std::ostream& out, std::ostream& err) {
    config::LoadedConfig loaded;
    try {
        loaded = config::load_config(args.config_path);
    } catch (const ValidationError& e) {
        err << e.what() << "\n";
        return kExitValidation;
    }

    if (loaded.demonstrations < 1) {
        err << "feasibility bound needs M >= 1 (the pure large-model baseline is M "
               "demonstration-equivalents)\n";
        return kExitValidation;
    }

    double small_sum = 0.0;
    for (const auto& backend : loaded.run.system1) {
        small_sum += costmodel::blended_price(loaded.prices.at(backend.name));
    }
    const double unit_small = small_sum / static_cast<double>(loaded.run.system1.size());
    const double unit_large = costmodel::blended_price(loaded.prices.at(loaded.run.system2.name));
    if (unit_large <= 0.0) {
        err << "system2 backend has zero blended price; the bound is undefined\n";
        return kExitValidation;
    }

    const double r_max = costmodel::feasible_intervention_rate(
        loaded.run.ensemble_size, unit_small, unit_large, loaded.demonstrations);

    out << "ensemble: K=" << loaded.run.ensemble_size << ", M=" << loaded.demonstrations
        << ", C_I=" << fmt(unit_small) << ", C_R=" << fmt(unit_large) << "\n";
    char line[96];
    if (r_max < 0.0) {
        out << "infeasible: no intervention rate saves cost (bound "
            << fmt(r_max * 100.0) << "%)\n";
    } else {
        std::snprintf(line, sizeof(line), "max cost-saving intervention rate: %.1f%%\n",
                      r_max * 100.0);
        out << line;
    }
    if (args.empirical_rate) {
        const bool saving = *args.empirical_rate < r_max;
        std::snprintf(line, sizeof(line), "at r=%.1f%%: %s\n", *args.empirical_rate * 100.0,
                      saving ? "cost-saving" : "not cost-saving");
        out << line;
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
    if (args.ensemble_size < 1 || args.demonstrations < 1 || args.unit_cost_large <= 0.0 ||
        args.unit_cost_small < 0.0 || args.trials < 1 || args.points < 2) {
        err << "simulate needs K >= 1, M >= 1, cr > 0, ci >= 0, trials >= 1, points >= 2\n";
        return kExitValidation;
    }

    costmodel::SynergyParams params;
    params.ensemble_size = args.ensemble_size;
    params.demonstrations = args.demonstrations;
    params.unit_cost_small = args.unit_cost_small;
    params.unit_cost_large = args.unit_cost_large;

    std::vector<double> sweep;
    sweep.reserve(static_cast<std::size_t>(args.points));
    for (int i = 0; i < args.points; ++i) {
        sweep.push_back(static_cast<double>(i) / static_cast<double>(args.points - 1));
    }

    costmodel::SynergyCurve curve =
        costmodel::simulate_synergy(params, sweep, args.trials, args.seed);

    std::string csv = "r,mean_cost,baseline\n";
    for (const auto& point : curve.points) {
        csv += fmt(point.rate) + ',' + fmt(point.mean_cost) + ',' + fmt(curve.baseline) + '\n';
    }
    write_text_file(args.out_path, csv);

    out << "baseline cost: " << fmt(curve.baseline) << "\n";
    if (curve.break_even) {
        out << "empirical break-even rate: " << fmt(*curve.break_even) << "\n";
    } else {
        out << "empirical break-even rate: none in [0,1] (always cheaper)\n";
    }
    const double closed = costmodel::feasible_intervention_rate(
        args.ensemble_size, args.unit_cost_small, args.unit_cost_large, args.demonstrations);
    out << "closed-form bound: " << fmt(closed) << "\n";
    out << "wrote " << args.out_path << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// argument parsing
// ---------------------------------------------------------------------------

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"dual-process reasoning engine over hybrid LLM backends"};
    app.require_subcommand(1);

    RunArgs run_args;
    auto* run = app.add_subcommand("run", "run the pipeline over an instances file");
    run->add_option("--config", run_args.config_path, "run configuration JSON")->required();
    run->add_option("--instances", run_args.instances_path, "JSON-lines instance file")
        ->required();
    run->add_option("--out", run_args.out_dir, "output directory (default: config out_dir)");
    run->add_option("--limit", run_args.limit, "run only the first N instances");
    run->add_option("--width", run_args.width, "max concurrent instances");
    run->add_option("--seed", run_args.seed, "seed for any sampling (scripted runs ignore it)");

    ReportArgs report_args;
    auto* report = app.add_subcommand("report", "aggregate transcripts into cost/metric tables");
    report->add_option("dir", report_args.transcripts_dir, "directory of transcript JSON files")
        ->required();
    report->add_option("--out", report_args.out_dir, "where to write report.csv/report.json");

    FeasibilityArgs feasibility_args;
    double empirical_rate = -1.0;
    auto* feasibility =
        app.add_subcommand("feasibility", "feasibility bound for the configured ensemble");
    feasibility->add_option("--config", feasibility_args.config_path, "run configuration JSON")
        ->required();
    feasibility->add_option("--rate", empirical_rate,
                            "empirical intervention rate to check, in [0,1]");

    SimulateArgs simulate_args;
    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo cost sweep over the rate");
    simulate->add_option("--K", simulate_args.ensemble_size, "ensemble size")->required();
    simulate->add_option("--M", simulate_args.demonstrations, "demonstrations per prompt");
    simulate->add_option("--ci", simulate_args.unit_cost_small, "small-model unit cost")
        ->required();
    simulate->add_option("--cr", simulate_args.unit_cost_large, "large-model unit cost")
        ->required();
    simulate->add_option("--trials", simulate_args.trials, "Monte-Carlo trials per point");
    simulate->add_option("--seed", simulate_args.seed, "RNG seed");
    simulate->add_option("--points", simulate_args.points, "sweep resolution");
    simulate->add_option("--out", simulate_args.out_path, "CSV output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::stringstream sink_out;
        std::stringstream sink_err;
        const int code = app.exit(e, sink_out, sink_err);
        out << sink_out.str();
        err << sink_err.str();
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (run->parsed()) return cmd_run(run_args, out, err);
        if (report->parsed()) return cmd_report(report_args, out, err);
        if (feasibility->parsed()) {
            if (empirical_rate >= 0.0) feasibility_args.empirical_rate = empirical_rate;
            return cmd_feasibility(feasibility_args, out, err);
        }
        if (simulate->parsed()) return cmd_simulate(simulate_args, out, err);
    } catch (const ValidationError& e) {
        err << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitValidation;
}

}  // namespace tandem::cli
