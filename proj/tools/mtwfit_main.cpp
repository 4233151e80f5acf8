// mtwfit command line front end: synthetic generation, measurement
// ingestion, the four-criteria fitting pipeline and plot-data export.

#include "mtwfit/csv.hpp"
#include "mtwfit/pipeline.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

using namespace mtwfit;

std::filesystem::path resolve_out_dir(const RunConfig& config, bool flag_set) {
    // Flag > MTWFIT_OUT_DIR > config/default.
    if (flag_set)
        return config.out_dir;
    if (const char* env = std::getenv("MTWFIT_OUT_DIR"))
        return std::filesystem::path(env);
    return config.out_dir;
}

struct CommonOptions {
    std::string config_file;
    std::vector<std::string> overrides; // key=value
    bool out_dir_flag = false;
};

void add_common(CLI::App* cmd, CommonOptions& common, RunConfig& config) {
    cmd->add_option("--config", common.config_file, "Key=value configuration file");
    cmd->add_option("--set", common.overrides, "Inline override, key=value (repeatable)");
    cmd->add_option("--seed", config.seed, "Generator seed");
    cmd->add_option("--tag", config.tag, "Output file tag");
    cmd->add_option_function<std::string>(
           "--out-dir",
           [&config, &common](const std::string& v) {
               config.out_dir = v;
               common.out_dir_flag = true;
           },
           "Output directory (overrides MTWFIT_OUT_DIR)");
    cmd->add_option("--workers", config.workers, "Worker threads (0 = auto)");
}

RunConfig finalize_config(const CommonOptions& common, RunConfig config) {
    if (!common.config_file.empty()) {
        // CLI flags take precedence: apply the file under current values
        // only where the flag did not change the default, which is achieved
        // by applying the file first onto a fresh config and re-applying
        // explicit overrides afterwards. Explicit --set pairs win last.
        RunConfig from_file;
        from_file.apply(parse_config_file(common.config_file));
        // Fields set by flags were already written into `config`; merge by
        // starting from the file config and copying flag-provided basics.
        from_file.seed = config.seed != RunConfig().seed ? config.seed : from_file.seed;
        from_file.tag = config.tag != RunConfig().tag ? config.tag : from_file.tag;
        from_file.workers = config.workers != RunConfig().workers ? config.workers
                                                                  : from_file.workers;
        if (config.out_dir != RunConfig().out_dir)
            from_file.out_dir = config.out_dir;
        if (!config.input.empty())
            from_file.input = config.input;
        if (config.input_format != RunConfig().input_format)
            from_file.input_format = config.input_format;
        if (config.n != RunConfig().n)
            from_file.n = config.n;
        config = from_file;
    }
    std::map<std::string, std::string> kv;
    for (const auto& item : common.overrides) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("--set expects key=value, got: " + item);
        kv[item.substr(0, eq)] = item.substr(eq + 1);
    }
    config.apply(kv);
    return config;
}

void write_samples_csv(const std::filesystem::path& path, const SampleSet& samples) {
    csv::Table t;
    t.header = {"amplitude"};
    t.rows.reserve(samples.values.size());
    for (double v : samples.values)
        t.rows.push_back({v});
    csv::write(path, t);
}

int run_report_command(const RunConfig& config, const CommonOptions& common,
                       bool experiment1_mode) {
    const auto out_dir = resolve_out_dir(config, common.out_dir_flag);
    RunConfig effective = config;
    effective.out_dir = out_dir;
    const RunReport report =
        experiment1_mode ? run_experiment1(effective) : run_fit(effective);
    const auto files = export_plot_data(report, out_dir);
    std::cout << report.gof.to_text();
    for (const auto& [target, snr] : report.empirical_op_snr) {
        std::cout << "empirical operational SNR @ OP=" << target << ": " << snr << " dB\n";
        for (const auto& [c, cr] : report.criteria) {
            const auto it = cr.op_gap.find(target);
            if (it != cr.op_gap.end())
                std::cout << "  gap(" << to_string(c) << ") = " << it->second << " dB\n";
        }
    }
    for (const auto& f : files)
        std::cout << "wrote " << f.string() << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"MTW fading-model fitting and performance benchmark toolkit"};
    app.require_subcommand(1);

    RunConfig config;
    CommonOptions common;

    // generate: draw synthetic envelope samples and write them as CSV.
    auto* cmd_generate = app.add_subcommand("generate", "Draw synthetic MTW samples");
    std::vector<double> truth_vec;
    std::string output_file = "samples.csv";
    bool no_normalize = false;
    cmd_generate->add_option("--params", truth_vec, "Truth K,Delta,mu")->expected(3);
    cmd_generate->add_option("--omega", config.truth.omega, "Power scale Omega");
    cmd_generate->add_option("--n", config.n, "Sample count");
    cmd_generate->add_option("--output", output_file, "Output CSV path");
    cmd_generate->add_flag("--raw", no_normalize, "Skip mean-square normalization");
    add_common(cmd_generate, common, config);

    // ingest: measurement CSV -> normalized amplitude CSV.
    auto* cmd_ingest = app.add_subcommand("ingest", "Normalize a measurement CSV");
    std::string ingest_out = "ingested.csv";
    cmd_ingest->add_option("--input", config.input, "Input CSV")->required();
    cmd_ingest->add_option("--format", config.input_format,
                           "Input layout: complex_csv | amplitude_csv");
    cmd_ingest->add_option("--output", ingest_out, "Output CSV path");
    add_common(cmd_ingest, common, config);

    // experiment1: synthetic end-to-end reproduction run.
    auto* cmd_e1 = app.add_subcommand("experiment1", "Synthetic-data end-to-end run");
    cmd_e1->add_option("--n", config.n, "Sample count");
    cmd_e1->add_option("--params", truth_vec, "Truth K,Delta,mu")->expected(3);
    add_common(cmd_e1, common, config);

    // fit: full pipeline on ingested data.
    auto* cmd_fit = app.add_subcommand("fit", "Fit criteria to a sample file");
    cmd_fit->add_option("--input", config.input, "Input CSV")->required();
    cmd_fit->add_option("--format", config.input_format,
                        "Input layout: complex_csv | amplitude_csv");
    add_common(cmd_fit, common, config);

    // evaluate: score a given parameter set against a sample file.
    auto* cmd_eval = app.add_subcommand("evaluate", "Evaluate GoF metrics at fixed params");
    std::vector<double> eval_params;
    cmd_eval->add_option("--input", config.input, "Input CSV")->required();
    cmd_eval->add_option("--format", config.input_format,
                         "Input layout: complex_csv | amplitude_csv");
    cmd_eval->add_option("--params", eval_params, "K,Delta,mu to score")->required()->expected(3);
    add_common(cmd_eval, common, config);

    // export: re-emit plot CSVs from a stored report.
    auto* cmd_export = app.add_subcommand("export", "Re-export plot data from a report");
    std::string report_path;
    cmd_export->add_option("--report", report_path, "report_<tag>.json path")->required();
    add_common(cmd_export, common, config);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_generate->parsed()) {
            RunConfig cfg = finalize_config(common, config);
            if (truth_vec.size() == 3) {
                cfg.truth.k = truth_vec[0];
                cfg.truth.delta = truth_vec[1];
                cfg.truth.mu = truth_vec[2];
            }
            cfg.truth.validate();
            SampleSet samples = sample_envelope(cfg.truth, cfg.n, cfg.seed, cfg.workers);
            if (!no_normalize)
                samples = normalize(samples);
            write_samples_csv(output_file, samples);
            std::cout << "wrote " << output_file << " (n=" << samples.values.size()
                      << ", seed=" << cfg.seed << ")\n";
            return 0;
        }
        if (cmd_ingest->parsed()) {
            RunConfig cfg = finalize_config(common, config);
            const SampleSet samples =
                ingest(cfg.input, ingest_format_from_string(cfg.input_format));
            write_samples_csv(ingest_out, samples);
            std::cout << "wrote " << ingest_out << " (n=" << samples.values.size() << ")\n";
            return 0;
        }
        if (cmd_e1->parsed()) {
            RunConfig cfg = finalize_config(common, config);
            if (truth_vec.size() == 3) {
                cfg.truth.k = truth_vec[0];
                cfg.truth.delta = truth_vec[1];
                cfg.truth.mu = truth_vec[2];
            }
            if (cfg.tag == "run")
                cfg.tag = "experiment1";
            return run_report_command(cfg, common, true);
        }
        if (cmd_fit->parsed()) {
            RunConfig cfg = finalize_config(common, config);
            if (cfg.tag == "run")
                cfg.tag = "fit";
            return run_report_command(cfg, common, false);
        }
        if (cmd_eval->parsed()) {
            RunConfig cfg = finalize_config(common, config);
            const SampleSet samples =
                ingest(cfg.input, ingest_format_from_string(cfg.input_format));
            const SampleStats stats = prepare_stats(samples, cfg.kde_grid_size,
                                                    cfg.points_per_decade, cfg.kde_bandwidth);
            const ParamSet params{eval_params[0], eval_params[1], eval_params[2], 1.0};
            params.validate();
            nlohmann::ordered_json j;
            j["params"] = {params.k, params.delta, params.mu};
            for (Criterion c : kAllCriteria)
                j[to_string(c)] = evaluate_criterion(c, stats, params);
            std::cout << j.dump(2) << '\n';
            return 0;
        }
        if (cmd_export->parsed()) {
            RunConfig cfg = finalize_config(common, config);
            std::ifstream is(report_path);
            if (!is)
                throw StageError("export", "cannot open report: " + report_path);
            // Rebuild the pipeline from the echoed config: the report is
            // self-contained, so a re-run reproduces it and the exporter
            // emits the same plot files.
            const auto j = nlohmann::ordered_json::parse(is);
            std::map<std::string, std::string> kv;
            for (const auto& [key, value] : j.at("config").items()) {
                if (value.is_string())
                    kv[key] = value.get<std::string>();
                else
                    kv[key] = value.dump();
            }
            RunConfig echoed;
            echoed.apply(kv);
            const auto out_dir = resolve_out_dir(cfg, common.out_dir_flag);
            echoed.out_dir = out_dir;
            const bool synthetic = echoed.input.empty();
            const RunReport report =
                synthetic ? run_experiment1(echoed) : run_fit(echoed);
            for (const auto& f : export_plot_data(report, out_dir))
                std::cout << "wrote " << f.string() << '\n';
            return 0;
        }
    } catch (const StageError& e) {
        std::cerr << "error " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
