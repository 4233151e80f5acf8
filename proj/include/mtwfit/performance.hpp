#ifndef MTWFIT_PERFORMANCE_HPP
#define MTWFIT_PERFORMANCE_HPP

#include "mtwfit/model.hpp"

#include <string>
#include <vector>

namespace mtwfit {

double db_to_linear(double db);
double linear_to_db(double value);

/// Benchmark configuration: threshold rate and average-SNR sweep grid.
struct PerfConfig {
    double r_th = 1.0;                 // bits/s/Hz
    std::vector<double> gamma_bar_db;  // average SNR grid, dB

    double gamma_th() const { return std::exp2(r_th) - 1.0; }
    static std::vector<double> default_grid(); // 0:0.5:40 dB
    static PerfConfig defaults();
};

struct OpEstimate {
    double value = 0.0;
    bool low_support = false; // fewer than 100 outage samples
};

/// Ergodic capacity: integral of log2(1 + gbar r^2 / Omega) f(r) dr by
/// adaptive quadrature; the truncated tail contributes < 1e-8.
double ec_model(const ParamSet& params, double gamma_bar_linear);

/// Sample-mean capacity (1/n) sum log2(1 + gbar r_i^2 / Omega_hat).
double ec_empirical(const SampleSet& samples, double gamma_bar_linear);

/// Outage probability F_r(sqrt(gamma_th Omega / gbar)).
double op_model(const ParamSet& params, double gamma_bar_linear, const PerfConfig& config);

/// Empirical outage: fraction of samples with r^2 gbar / Omega_hat below
/// gamma_th. With fewer than 100 outage samples the estimate is reported
/// as 0 with the low-support flag set.
OpEstimate op_empirical(const SampleSet& samples, double gamma_bar_linear,
                        const PerfConfig& config);

/// EC and OP along the configured average-SNR grid.
struct PerfCurve {
    std::vector<double> gamma_bar_db;
    std::vector<double> ec;
    std::vector<double> op;
    std::vector<char> op_low_support; // empirical curves only
    std::string source;

    void validate() const;
};

PerfCurve sweep(const ParamSet& params, const PerfConfig& config);
PerfCurve sweep(const SampleSet& samples, const PerfConfig& config);

/// Average SNR (dB) at which the OP curve crosses the target, by linear
/// interpolation of log10(OP) against dB. On empirical curves the crossing
/// may fall just past the last reliable point; the local slope is then
/// extended, capped at the first flagged grid point (outage counts are
/// monotone, so the crossing is bracketed there).
double operational_snr(const PerfCurve& curve, double target_op);

} // namespace mtwfit

#endif
