#include "mtwfit/pipeline.hpp"

#include "mtwfit/csv.hpp"
#include "mtwfit/math/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mtwfit {

using ordered_json = nlohmann::ordered_json;

namespace {

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos)
            out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size())
            throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad numeric value for '" + key + "': " + value);
    }
}

long long parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(value, &pos);
        if (pos != value.size())
            throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad integer value for '" + key + "': " + value);
    }
}

std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    for (const auto& item : split_list(value))
        out.push_back(parse_double(key, item));
    return out;
}

// Stable per-criterion identifier for substream derivation; independent of
// which criteria are enabled in a given run.
std::uint64_t criterion_stream(std::uint64_t seed, Criterion c) {
    return math::splitmix64(seed ^ (0x9e3779b97f4a7c15ull + static_cast<int>(c)));
}

} // namespace

IngestFormat ingest_format_from_string(const std::string& name) {
    if (name == "complex_csv")
        return IngestFormat::complex_csv;
    if (name == "amplitude_csv")
        return IngestFormat::amplitude_csv;
    throw std::invalid_argument("unknown ingest format: " + name);
}

std::string to_string(IngestFormat format) {
    return format == IngestFormat::complex_csv ? "complex_csv" : "amplitude_csv";
}

PerfConfig RunConfig::perf_config() const {
    PerfConfig config;
    config.r_th = r_th;
    for (double db = snr_db_min; db <= snr_db_max + 1e-9; db += snr_db_step)
        config.gamma_bar_db.push_back(db);
    return config;
}

void RunConfig::validate() const {
    truth.validate();
    box.validate();
    if (n < 10)
        throw std::invalid_argument("config: n must be >= 10");
    if (starts < 1)
        throw std::invalid_argument("config: starts must be >= 1");
    if (criteria.empty())
        throw std::invalid_argument("config: at least one criterion required");
    if (!(snr_db_step > 0.0) || !(snr_db_max > snr_db_min))
        throw std::invalid_argument("config: bad SNR grid");
    if (!(r_th > 0.0))
        throw std::invalid_argument("config: R_th must be > 0");
    for (double t : target_ops)
        if (!(t > 0.0) || !(t < 1.0))
            throw std::invalid_argument("config: target OPs must lie in (0, 1)");
}

void RunConfig::apply(const std::map<std::string, std::string>& kv) {
    for (const auto& [key, value] : kv) {
        if (key == "n") n = static_cast<std::size_t>(parse_int(key, value));
        else if (key == "seed") seed = static_cast<std::uint64_t>(parse_int(key, value));
        else if (key == "truth_k") truth.k = parse_double(key, value);
        else if (key == "truth_delta") truth.delta = parse_double(key, value);
        else if (key == "truth_mu") truth.mu = parse_double(key, value);
        else if (key == "kde_grid_size") kde_grid_size = static_cast<std::size_t>(parse_int(key, value));
        else if (key == "kde_bandwidth") kde_bandwidth = parse_double(key, value);
        else if (key == "points_per_decade") points_per_decade = static_cast<int>(parse_int(key, value));
        else if (key == "criteria") {
            criteria.clear();
            for (const auto& name : split_list(value))
                criteria.push_back(criterion_from_string(name));
        }
        else if (key == "box_k_min") box.k_range[0] = parse_double(key, value);
        else if (key == "box_k_max") box.k_range[1] = parse_double(key, value);
        else if (key == "box_delta_min") box.delta_range[0] = parse_double(key, value);
        else if (key == "box_delta_max") box.delta_range[1] = parse_double(key, value);
        else if (key == "box_mu_min") box.mu_range[0] = parse_double(key, value);
        else if (key == "box_mu_max") box.mu_range[1] = parse_double(key, value);
        else if (key == "starts") starts = static_cast<int>(parse_int(key, value));
        else if (key == "nm_max_iterations") nm.max_iterations = static_cast<int>(parse_int(key, value));
        else if (key == "nm_diameter_tol") nm.diameter_tol = parse_double(key, value);
        else if (key == "nm_fspread_tol") nm.fspread_tol = parse_double(key, value);
        else if (key == "theta_nodes") theta_nodes = static_cast<int>(parse_int(key, value));
        else if (key == "log_pdf_grid") log_pdf_grid = static_cast<std::size_t>(parse_int(key, value));
        else if (key == "r_th") r_th = parse_double(key, value);
        else if (key == "snr_db_min") snr_db_min = parse_double(key, value);
        else if (key == "snr_db_max") snr_db_max = parse_double(key, value);
        else if (key == "snr_db_step") snr_db_step = parse_double(key, value);
        else if (key == "target_ops") target_ops = parse_double_list(key, value);
        else if (key == "ec_check_db") ec_check_db = parse_double_list(key, value);
        else if (key == "workers") workers = static_cast<int>(parse_int(key, value));
        else if (key == "tag") tag = value;
        else if (key == "input") input = value;
        else if (key == "input_format") input_format = value;
        else if (key == "out_dir") out_dir = value;
        else throw std::invalid_argument("config: unknown key '" + key + "'");
    }
}

std::map<std::string, std::string> parse_config_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("config: cannot open " + path.string());
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos)
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config: missing '=' at line " + std::to_string(line_no));
        auto trim = [](std::string s) {
            const auto sb = s.find_first_not_of(" \t\r");
            const auto se = s.find_last_not_of(" \t\r");
            return sb == std::string::npos ? std::string() : s.substr(sb, se - sb + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error("config: empty key at line " + std::to_string(line_no));
        kv[key] = value;
    }
    return kv;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
    RunConfig config;
    config.apply(parse_config_file(path));
    return config;
}

std::string RunConfig::echo_json() const {
    ordered_json j;
    j["n"] = n;
    j["seed"] = seed;
    j["truth_k"] = truth.k;
    j["truth_delta"] = truth.delta;
    j["truth_mu"] = truth.mu;
    j["kde_grid_size"] = kde_grid_size;
    j["kde_bandwidth"] = kde_bandwidth;
    j["points_per_decade"] = points_per_decade;
    std::string crit;
    for (Criterion c : criteria) {
        if (!crit.empty())
            crit += ",";
        crit += to_string(c);
    }
    j["criteria"] = crit;
    j["box_k_min"] = box.k_range[0];
    j["box_k_max"] = box.k_range[1];
    j["box_delta_min"] = box.delta_range[0];
    j["box_delta_max"] = box.delta_range[1];
    j["box_mu_min"] = box.mu_range[0];
    j["box_mu_max"] = box.mu_range[1];
    j["starts"] = starts;
    j["nm_max_iterations"] = nm.max_iterations;
    j["nm_diameter_tol"] = nm.diameter_tol;
    j["nm_fspread_tol"] = nm.fspread_tol;
    j["theta_nodes"] = theta_nodes;
    j["log_pdf_grid"] = log_pdf_grid;
    j["r_th"] = r_th;
    j["snr_db_min"] = snr_db_min;
    j["snr_db_max"] = snr_db_max;
    j["snr_db_step"] = snr_db_step;
    j["target_ops"] = target_ops;
    j["ec_check_db"] = ec_check_db;
    j["workers"] = workers;
    j["tag"] = tag;
    j["input"] = input.string();
    j["input_format"] = input_format;
    j["out_dir"] = out_dir.string();
    return j.dump(2);
}

SampleSet ingest(const std::filesystem::path& path, IngestFormat format) {
    csv::Table table;
    try {
        table = csv::read(path);
    } catch (const std::exception& e) {
        throw StageError("ingest", e.what());
    }
    if (table.rows.size() < 10)
        throw StageError("ingest", "need at least 10 data rows, got " +
                                       std::to_string(table.rows.size()));
    SampleSet samples;
    samples.values.reserve(table.rows.size());
    const std::size_t want = format == IngestFormat::complex_csv ? 2 : 1;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const std::size_t line_no = i + 2; // header occupies line 1
        if (row.size() != want)
            throw StageError("ingest", "expected " + std::to_string(want) +
                                           " columns at line " + std::to_string(line_no));
        double amplitude;
        if (format == IngestFormat::complex_csv) {
            if (!std::isfinite(row[0]) || !std::isfinite(row[1]))
                throw StageError("ingest", "non-finite value at line " +
                                               std::to_string(line_no));
            amplitude = std::hypot(row[0], row[1]);
        } else {
            amplitude = row[0];
            if (!std::isfinite(amplitude) || amplitude < 0.0)
                throw StageError("ingest", "invalid amplitude at line " +
                                               std::to_string(line_no));
        }
        samples.values.push_back(amplitude);
    }
    samples.source = "ingest:" + to_string(format) + ":" + path.string();
    try {
        return normalize(samples);
    } catch (const std::exception& e) {
        throw StageError("ingest", e.what());
    }
}

namespace {

template <typename Fn>
auto stage(const char* name, Fn&& fn) {
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

std::vector<double> log10_clamped(const std::vector<double>& values) {
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        out[i] = std::log10(std::max(values[i], 1e-300));
    return out;
}

} // namespace

RunReport run_pipeline(const RunConfig& config, const SampleSet& raw_samples,
                       std::optional<ParamSet> truth) {
    config.validate();
    RunReport report;
    report.tag = config.tag;
    report.config_echo = config.echo_json();
    report.truth = truth;

    const SampleSet samples =
        stage("normalize", [&] { return raw_samples.normalized ? raw_samples
                                                               : normalize(raw_samples); });
    report.n = samples.values.size();
    report.sample_seed = samples.seed;
    report.sample_source = samples.source;
    report.mean_square_raw = raw_samples.mean_square();

    const SampleStats stats = stage("stats", [&] {
        return prepare_stats(samples, config.kde_grid_size, config.points_per_decade,
                             config.kde_bandwidth);
    });

    const PerfConfig perf = config.perf_config();

    report.empirical_curve = stage("sweep", [&] { return sweep(samples, perf); });
    report.empirical_curve.source = "empirical";
    for (double target : config.target_ops) {
        const double snr = stage("metrics", [&] {
            return operational_snr(report.empirical_curve, target);
        });
        report.empirical_op_snr[target] = snr;
    }

    std::vector<double> ec_empirical_at(config.ec_check_db.size());
    for (std::size_t i = 0; i < config.ec_check_db.size(); ++i)
        ec_empirical_at[i] = ec_empirical(samples, db_to_linear(config.ec_check_db[i]));

    std::map<Criterion, ParamSet> fitted;
    for (Criterion c : config.criteria) {
        CriterionReport cr;
        cr.fit = stage("fit", [&] {
            return fit(stats, c, config.box, config.starts,
                       criterion_stream(config.seed, c), config.nm, config.workers);
        });
        fitted[c] = cr.fit.lambda_hat;
        report.criteria[c] = std::move(cr);
    }

    report.gof = stage("table", [&] { return cross_table(stats, fitted); });

    for (auto& [c, cr] : report.criteria) {
        cr.curve = stage("sweep", [&] { return sweep(cr.fit.lambda_hat, perf); });
        cr.curve.source = to_string(c);
        for (double target : config.target_ops) {
            try {
                const double snr = operational_snr(cr.curve, target);
                cr.op_snr[target] = snr;
                cr.op_gap[target] = report.empirical_op_snr.at(target) - snr;
            } catch (const std::out_of_range&) {
                // Curve does not reach the target within the grid; gap omitted.
            }
        }
        cr.ec_rel_dev.resize(config.ec_check_db.size());
        for (std::size_t i = 0; i < config.ec_check_db.size(); ++i) {
            const double ec_fit =
                ec_model(cr.fit.lambda_hat, db_to_linear(config.ec_check_db[i]));
            cr.ec_rel_dev[i] = ec_empirical_at[i] > 0.0
                                   ? std::abs(ec_fit - ec_empirical_at[i]) / ec_empirical_at[i]
                                   : 0.0;
        }
    }

    if (truth) {
        auto curve = stage("sweep", [&] { return sweep(*truth, perf); });
        curve.source = "truth";
        report.truth_curve = std::move(curve);
    }

    // Plot data on the shared grids.
    stage("report", [&] {
        report.pdf_grid = stats.dens.grid;
        report.pdf_empirical = stats.dens.density;
        report.logcdf_grid = stats.ks_grid;
        std::vector<double> f_hat(stats.ks_grid.size());
        for (std::size_t i = 0; i < stats.ks_grid.size(); ++i)
            f_hat[i] = stats.cdf(stats.ks_grid[i]);
        report.logcdf_empirical = log10_clamped(f_hat);
        if (truth) {
            report.pdf_truth = pdf(*truth, report.pdf_grid, config.theta_nodes);
            report.logcdf_truth =
                log10_clamped(cdf(*truth, report.logcdf_grid, config.theta_nodes));
        }
        for (const auto& [c, cr] : report.criteria) {
            report.pdf_fit[c] = pdf(cr.fit.lambda_hat, report.pdf_grid, config.theta_nodes);
            report.logcdf_fit[c] =
                log10_clamped(cdf(cr.fit.lambda_hat, report.logcdf_grid, config.theta_nodes));
        }
        return 0;
    });

    return report;
}

RunReport run_experiment1(const RunConfig& config) {
    config.validate();
    const SampleSet draw = stage("sample", [&] {
        ParamSet truth = config.truth;
        truth.omega = 1.0;
        return sample_envelope(truth, config.n, config.seed, config.workers);
    });
    ParamSet truth = config.truth;
    truth.omega = 1.0;
    return run_pipeline(config, draw, truth);
}

RunReport run_fit(const RunConfig& config) {
    if (config.input.empty())
        throw StageError("ingest", "fit mode requires an input path");
    const SampleSet samples = ingest(config.input, ingest_format_from_string(config.input_format));
    return run_pipeline(config, samples, std::nullopt);
}

std::string RunReport::to_json() const {
    ordered_json j;
    j["tag"] = tag;
    j["config"] = ordered_json::parse(config_echo);
    j["samples"]["n"] = n;
    if (sample_seed)
        j["samples"]["seed"] = *sample_seed;
    j["samples"]["source"] = sample_source;
    j["samples"]["mean_square_raw"] = mean_square_raw;
    if (truth) {
        j["truth"] = {{"k", truth->k}, {"delta", truth->delta}, {"mu", truth->mu},
                      {"omega", truth->omega}};
    }

    ordered_json fits;
    for (const auto& [c, cr] : criteria) {
        ordered_json f;
        f["lambda"] = {cr.fit.lambda_hat.k, cr.fit.lambda_hat.delta, cr.fit.lambda_hat.mu};
        f["gof_value"] = cr.fit.gof_value;
        f["starts"] = cr.fit.starts;
        f["converged"] = cr.fit.converged;
        f["evaluations"] = cr.fit.evaluations;
        f["best_start_index"] = cr.fit.best_start_index;
        ordered_json snr, gap;
        for (const auto& [t, v] : cr.op_snr)
            snr[csv::format_double(t)] = v;
        for (const auto& [t, v] : cr.op_gap)
            gap[csv::format_double(t)] = v;
        f["op_snr_db"] = snr;
        f["op_gap_db"] = gap;
        f["ec_rel_dev"] = cr.ec_rel_dev;
        fits[to_string(c)] = f;
    }
    j["fits"] = fits;

    ordered_json table;
    for (std::size_t r = 0; r < gof.rows.size(); ++r) {
        ordered_json row;
        row["criterion"] = to_string(gof.rows[r]);
        row["llm"] = gof.values[r][0];
        row["mse"] = gof.values[r][1];
        row["rad"] = gof.values[r][2];
        row["ks"] = gof.values[r][3];
        table.push_back(row);
    }
    j["gof_table"] = table;

    ordered_json emp;
    for (const auto& [t, v] : empirical_op_snr)
        emp[csv::format_double(t)] = v;
    j["empirical_op_snr_db"] = emp;

    auto curve_json = [](const PerfCurve& curve) {
        ordered_json c;
        c["gamma_bar_db"] = curve.gamma_bar_db;
        c["ec"] = curve.ec;
        c["op"] = curve.op;
        if (!curve.op_low_support.empty()) {
            std::vector<int> flags(curve.op_low_support.begin(), curve.op_low_support.end());
            c["op_low_support"] = flags;
        }
        return c;
    };
    j["curves"]["empirical"] = curve_json(empirical_curve);
    if (truth_curve)
        j["curves"]["truth"] = curve_json(*truth_curve);
    for (const auto& [c, cr] : criteria)
        j["curves"][to_string(c)] = curve_json(cr.curve);

    j["plots"]["pdf_grid"] = pdf_grid;
    j["plots"]["pdf_empirical"] = pdf_empirical;
    if (pdf_truth)
        j["plots"]["pdf_truth"] = *pdf_truth;
    for (const auto& [c, v] : pdf_fit)
        j["plots"]["pdf_" + to_string(c)] = v;
    j["plots"]["logcdf_grid"] = logcdf_grid;
    j["plots"]["logcdf_empirical"] = logcdf_empirical;
    if (logcdf_truth)
        j["plots"]["logcdf_truth"] = *logcdf_truth;
    for (const auto& [c, v] : logcdf_fit)
        j["plots"]["logcdf_" + to_string(c)] = v;

    return j.dump(2);
}

std::vector<std::filesystem::path> export_plot_data(const RunReport& report,
                                                    const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec)
        throw StageError("export", "cannot create " + out_dir.string() + ": " + ec.message());

    std::vector<std::filesystem::path> written;
    auto emit = [&](const std::filesystem::path& name, const csv::Table& table) {
        const auto path = out_dir / name;
        try {
            csv::write(path, table);
        } catch (const std::exception& e) {
            throw StageError("export", e.what());
        }
        written.push_back(path);
    };

    // PDF per source on the density grid.
    {
        csv::Table t;
        t.header = {"r", "empirical"};
        if (report.pdf_truth)
            t.header.push_back("truth");
        for (const auto& [c, v] : report.pdf_fit)
            t.header.push_back(to_string(c));
        for (std::size_t i = 0; i < report.pdf_grid.size(); ++i) {
            std::vector<double> row = {report.pdf_grid[i], report.pdf_empirical[i]};
            if (report.pdf_truth)
                row.push_back((*report.pdf_truth)[i]);
            for (const auto& [c, v] : report.pdf_fit)
                row.push_back(v[i]);
            t.rows.push_back(std::move(row));
        }
        emit("pdf_" + report.tag + ".csv", t);
    }

    // log-CDF per source; abscissa in amplitude dB.
    {
        csv::Table t;
        t.header = {"r_db", "empirical"};
        if (report.logcdf_truth)
            t.header.push_back("truth");
        for (const auto& [c, v] : report.logcdf_fit)
            t.header.push_back(to_string(c));
        for (std::size_t i = 0; i < report.logcdf_grid.size(); ++i) {
            std::vector<double> row = {20.0 * std::log10(report.logcdf_grid[i]),
                                       report.logcdf_empirical[i]};
            if (report.logcdf_truth)
                row.push_back((*report.logcdf_truth)[i]);
            for (const auto& [c, v] : report.logcdf_fit)
                row.push_back(v[i]);
            t.rows.push_back(std::move(row));
        }
        emit("logcdf_" + report.tag + ".csv", t);
    }

    // EC/OP per source on the SNR grid.
    {
        csv::Table t;
        t.header = {"gamma_db", "ec_empirical", "op_empirical"};
        if (report.truth_curve) {
            t.header.push_back("ec_truth");
            t.header.push_back("op_truth");
        }
        for (const auto& [c, cr] : report.criteria) {
            t.header.push_back("ec_" + to_string(c));
            t.header.push_back("op_" + to_string(c));
        }
        for (std::size_t i = 0; i < report.empirical_curve.gamma_bar_db.size(); ++i) {
            std::vector<double> row = {report.empirical_curve.gamma_bar_db[i],
                                       report.empirical_curve.ec[i],
                                       report.empirical_curve.op[i]};
            if (report.truth_curve) {
                row.push_back(report.truth_curve->ec[i]);
                row.push_back(report.truth_curve->op[i]);
            }
            for (const auto& [c, cr] : report.criteria) {
                row.push_back(cr.curve.ec[i]);
                row.push_back(cr.curve.op[i]);
            }
            t.rows.push_back(std::move(row));
        }
        emit("perf_" + report.tag + ".csv", t);
    }

    // GoF table, CSV and aligned text.
    {
        const auto csv_path = out_dir / ("gof_" + report.tag + ".csv");
        const auto txt_path = out_dir / ("gof_" + report.tag + ".txt");
        std::ofstream cs(csv_path, std::ios::binary);
        cs << report.gof.to_csv();
        std::ofstream ts(txt_path, std::ios::binary);
        ts << report.gof.to_text();
        if (!cs || !ts)
            throw StageError("export", "write failed in " + out_dir.string());
        written.push_back(csv_path);
        written.push_back(txt_path);
    }

    {
        const auto path = out_dir / ("report_" + report.tag + ".json");
        std::ofstream os(path, std::ios::binary);
        os << report.to_json() << '\n';
        if (!os)
            throw StageError("export", "write failed: " + path.string());
        written.push_back(path);
    }
    return written;
}

} // namespace mtwfit
