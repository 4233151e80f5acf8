#ifndef MTWFIT_MODEL_HPP
#define MTWFIT_MODEL_HPP

#include "mtwfit/math/interp.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mtwfit {

/// Shape/scale parameters of the MTW fading distribution.
struct ParamSet {
    double k = 0.0;      // specular-to-diffuse power ratio, >= 0
    double delta = 0.0;  // specular amplitude balance, in [0, 1]
    double mu = 1.0;     // cluster count (may be non-integer), > 0
    double omega = 1.0;  // mean square envelope power, > 0

    void validate() const;
};

/// Physical-model parameters: two specular amplitudes plus the per-component
/// diffuse variance. Canonical ordering keeps v1 >= v2.
struct PhysicalParams {
    double v1 = 0.0;
    double v2 = 0.0;
    double sigma2 = 0.5;
    double mu = 1.0;

    void validate() const;
};

/// Envelope sample vector with normalization metadata.
struct SampleSet {
    std::vector<double> values;
    bool normalized = false;
    std::string source;
    std::optional<std::uint64_t> seed;

    void validate() const;
    double mean_square() const;
};

PhysicalParams physical_from_shape(const ParamSet& params);
ParamSet shape_from_physical(const PhysicalParams& phys);

/// Number of Gauss-Legendre nodes for the inter-wave phase average.
/// 96 keeps the node-doubling change below 1e-8 over the whole
/// K<=45, mu<=6 solution box (the worst corner needs more than 64).
inline constexpr int kThetaNodesDefault = 96;

/// Floor applied to log-densities where the PDF underflows.
inline constexpr double kLogPdfFloor = -745.0;

/// Semi-analytic MTW distribution. The PDF/CDF are exact phase-conditioned
/// mixtures: conditioned on the inter-wave phase theta, the envelope is
/// kappa-mu distributed, and the theta average is taken by fixed-node
/// Gauss-Legendre quadrature on [0, pi]. Internally the quadrature and the
/// noncentral-chi-square Poisson series are fused into a single set of
/// phase-averaged Poisson weights, so each evaluation is one gamma-mixture
/// scan regardless of the node count.
class MtwDistribution {
  public:
    explicit MtwDistribution(const ParamSet& params, int theta_nodes = kThetaNodesDefault);

    const ParamSet& params() const { return params_; }
    int theta_nodes() const { return theta_nodes_; }

    double pdf(double x) const;
    double cdf(double x) const;
    /// log f(x); kLogPdfFloor where the density underflows (or x == 0).
    double log_pdf(double x) const;
    /// log f(x) - (2 mu - 1) log x: the smooth factor of the log-density,
    /// finite at x = 0. Used to interpolate near the origin.
    double log_pdf_regular(double x) const;

    std::vector<double> pdf(std::span<const double> grid) const;
    std::vector<double> cdf(std::span<const double> grid) const;

  private:
    ParamSet params_;
    int theta_nodes_;
    double c2_;                    // mu (1 + K) / Omega = 1 / (2 sigma^2)
    std::vector<double> weights_;  // phase-averaged Poisson weights W_j

    struct SeriesEval {
        double log_pdf_series; // log sum_j W_j g_j(y)
        double cdf;            // sum_j W_j P(mu + j, y)
    };
    SeriesEval series(double y, bool want_cdf) const;
};

/// Draws n independent envelope realizations of the physical model
/// (two specular phasors plus mu clusters of diffuse power; non-integer mu
/// realized through the gamma-distributed diffuse sum of squares).
/// Reproducible for a fixed seed and any worker count.
SampleSet sample_envelope(const ParamSet& params, std::size_t n, std::uint64_t seed,
                          int workers = 0);

/// f_r on a grid (non-negative, strictly increasing).
std::vector<double> pdf(const ParamSet& params, std::span<const double> grid,
                        int theta_nodes = kThetaNodesDefault);

/// F_r on a grid (same grid contract as pdf).
std::vector<double> cdf(const ParamSet& params, std::span<const double> grid,
                        int theta_nodes = kThetaNodesDefault);

/// Dense-grid log-density evaluator: the smooth log-density factor is
/// tabulated on a uniform grid and interpolated with a monotone cubic,
/// which makes scoring large sample vectors cheap.
class LogPdfInterpolant {
  public:
    LogPdfInterpolant(const ParamSet& params, double x_max,
                      std::size_t grid_size = 4096,
                      int theta_nodes = kThetaNodesDefault);

    double operator()(double x) const;
    double x_max() const { return x_max_; }

  private:
    double two_mu_minus_one_;
    double x_max_;
    math::PchipInterpolant regular_;
};

/// log f at each point through the dense-grid interpolant.
std::vector<double> log_pdf(const ParamSet& params, std::span<const double> points,
                            std::size_t grid_size = 4096,
                            int theta_nodes = kThetaNodesDefault);

/// log f evaluated exactly (no interpolation); reference path for tests.
std::vector<double> log_pdf_direct(const ParamSet& params, std::span<const double> points,
                                   int theta_nodes = kThetaNodesDefault);

/// Per-theta-node evaluation with the conditional kappa-mu density in log
/// form, combined by log-sum-exp. Slower reference route used to validate
/// the fused weight expansion.
double pdf_theta_reference(const ParamSet& params, double x,
                           int theta_nodes = kThetaNodesDefault);
double cdf_theta_reference(const ParamSet& params, double x,
                           int theta_nodes = kThetaNodesDefault);

} // namespace mtwfit

#endif
