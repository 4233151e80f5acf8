#ifndef MTWFIT_EMPIRICAL_HPP
#define MTWFIT_EMPIRICAL_HPP

#include "mtwfit/model.hpp"

#include <vector>

namespace mtwfit {

/// Kernel density estimate on an evaluation grid.
struct DensityEstimate {
    std::vector<double> grid;    // strictly increasing abscissas
    std::vector<double> density; // >= 0
    double bandwidth = 0.0;

    std::size_t grid_size() const { return grid.size(); }
    double trapezoid_integral() const;
};

/// Right-continuous step ECDF over the sorted sample.
struct CdfEstimate {
    std::vector<double> sorted_values;

    /// F(x) = #(samples <= x) / n.
    double operator()(double x) const;
    std::size_t count_at_or_below(double x) const;
    std::size_t size() const { return sorted_values.size(); }
};

/// Rescales to unit mean square and sets the normalized flag. Inputs that
/// are already normalized within 1e-12 pass through untouched, so the
/// operation is idempotent at the bit level.
SampleSet normalize(const SampleSet& samples);

/// Gaussian-kernel density on a uniform grid over [0, 1.05 max sample].
/// Bandwidth: h = sigma_hat (4 / 3n)^(1/5), sigma_hat = min(std, IQR/1.349),
/// overridable. No boundary correction by default; reflect=true mirrors
/// mass at r = 0.
DensityEstimate kde(const SampleSet& samples, std::size_t grid_size = 500,
                    double bandwidth_override = 0.0, bool reflect = false);

CdfEstimate ecdf(const SampleSet& samples);

/// Logarithmically spaced grid from the smallest positive sample to the
/// maximum, with the given resolution. The ECDF is positive on every
/// point, so log10 F is defined throughout.
std::vector<double> log_cdf_grid(const SampleSet& samples, int points_per_decade = 200);

/// Sample statistics bundle consumed by the criteria and the fitter.
struct SampleStats {
    SampleSet samples;   // normalized
    DensityEstimate dens;
    CdfEstimate cdf;
    std::vector<double> ks_grid;
};

SampleStats prepare_stats(const SampleSet& samples, std::size_t kde_grid_size = 500,
                          int points_per_decade = 200, double bandwidth_override = 0.0);

} // namespace mtwfit

#endif
