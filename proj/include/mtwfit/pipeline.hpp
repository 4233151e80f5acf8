#ifndef MTWFIT_PIPELINE_HPP
#define MTWFIT_PIPELINE_HPP

#include "mtwfit/fitter.hpp"
#include "mtwfit/gof.hpp"
#include "mtwfit/performance.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

namespace mtwfit {

/// Pipeline failure tagged with the stage that raised it.
class StageError : public std::runtime_error {
  public:
    StageError(std::string stage, const std::string& message)
        : std::runtime_error("[" + stage + "] " + message), stage_(std::move(stage)) {}
    const std::string& stage() const { return stage_; }

  private:
    std::string stage_;
};

enum class IngestFormat { complex_csv, amplitude_csv };

IngestFormat ingest_format_from_string(const std::string& name);
std::string to_string(IngestFormat format);

/// Full run configuration; defaults reproduce the synthetic experiment
/// (truth [K, Delta, mu] = [15, 0.9, 2], n = 1e6, unit-power normalization).
struct RunConfig {
    // Synthesis
    ParamSet truth{15.0, 0.9, 2.0, 1.0};
    std::size_t n = 1000000;
    std::uint64_t seed = 12345;

    // Statistics
    std::size_t kde_grid_size = 500;
    double kde_bandwidth = 0.0; // 0 = normal-reference rule
    int points_per_decade = 200;

    // Fitting
    std::vector<Criterion> criteria = {Criterion::ml, Criterion::mse, Criterion::rad,
                                       Criterion::ks};
    SolutionBox box;
    int starts = 8;
    opt::NmOptions nm;
    int theta_nodes = kThetaNodesDefault;
    std::size_t log_pdf_grid = 4096;

    // Benchmarks
    double r_th = 1.0;
    double snr_db_min = 0.0;
    double snr_db_max = 40.0;
    double snr_db_step = 0.5;
    std::vector<double> target_ops = {1e-4};
    std::vector<double> ec_check_db = {0.0, 10.0, 20.0, 30.0};

    // Execution
    int workers = 0;
    std::string tag = "run";
    std::filesystem::path input;
    std::string input_format = "amplitude_csv";
    std::filesystem::path out_dir = "out";

    PerfConfig perf_config() const;
    void validate() const;

    /// Applies "key = value" overrides; unknown keys are rejected.
    void apply(const std::map<std::string, std::string>& kv);
    static RunConfig from_file(const std::filesystem::path& path);

    /// Every value that affects the numerics, as ordered JSON.
    std::string echo_json() const;
};

std::map<std::string, std::string> parse_config_file(const std::filesystem::path& path);

struct CriterionReport {
    FitResult fit;
    PerfCurve curve;
    std::map<double, double> op_snr;  // target -> dB (may be absent on failure)
    std::map<double, double> op_gap;  // target -> empirical - fit, dB
    std::vector<double> ec_rel_dev;   // at ec_check_db
};

struct RunReport {
    std::string tag;
    std::string config_echo; // JSON
    std::size_t n = 0;
    std::optional<std::uint64_t> sample_seed;
    std::string sample_source;
    double mean_square_raw = 0.0;

    std::optional<ParamSet> truth;
    std::map<Criterion, CriterionReport> criteria;
    GofTable gof;

    PerfCurve empirical_curve;
    std::optional<PerfCurve> truth_curve;
    std::map<double, double> empirical_op_snr; // target -> dB

    // Plot data (per-source columns on shared grids)
    std::vector<double> pdf_grid;
    std::vector<double> pdf_empirical;
    std::optional<std::vector<double>> pdf_truth;
    std::map<Criterion, std::vector<double>> pdf_fit;
    std::vector<double> logcdf_grid;
    std::vector<double> logcdf_empirical;
    std::optional<std::vector<double>> logcdf_truth;
    std::map<Criterion, std::vector<double>> logcdf_fit;

    std::string to_json() const;
};

/// Reads a measurement file (complex S-parameter rows or plain amplitudes),
/// extracts amplitudes and normalizes to unit mean square.
SampleSet ingest(const std::filesystem::path& path, IngestFormat format);

/// Four-step procedure on provided sample data; empirical distributions are
/// the benchmark. Pass the truth parameters when they are known so the
/// report carries the reference curves.
RunReport run_pipeline(const RunConfig& config, const SampleSet& samples,
                       std::optional<ParamSet> truth);

/// Synthetic end-to-end run: draw from the configured truth, then fit,
/// cross-evaluate, sweep benchmarks and assemble the report.
RunReport run_experiment1(const RunConfig& config);

/// Same pipeline on ingested data (no known truth).
RunReport run_fit(const RunConfig& config);

/// Writes report JSON plus pdf/logcdf/perf/gof plot files into out_dir.
std::vector<std::filesystem::path> export_plot_data(const RunReport& report,
                                                    const std::filesystem::path& out_dir);

} // namespace mtwfit

#endif
