#include "mtwfit/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mtwfit {

namespace {

double quantile_sorted(const std::vector<double>& sorted, double q) {
    // Linear interpolation between order statistics (type 7).
    const std::size_t n = sorted.size();
    const double pos = q * static_cast<double>(n - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= n)
        return sorted.back();
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

} // namespace

double DensityEstimate::trapezoid_integral() const {
    double acc = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i)
        acc += 0.5 * (density[i] + density[i - 1]) * (grid[i] - grid[i - 1]);
    return acc;
}

double CdfEstimate::operator()(double x) const {
    return static_cast<double>(count_at_or_below(x)) /
           static_cast<double>(sorted_values.size());
}

std::size_t CdfEstimate::count_at_or_below(double x) const {
    return static_cast<std::size_t>(
        std::upper_bound(sorted_values.begin(), sorted_values.end(), x) -
        sorted_values.begin());
}

SampleSet normalize(const SampleSet& samples) {
    samples.validate();
    const double ms = samples.mean_square();
    if (!(ms > 0.0))
        throw std::invalid_argument("normalize: all-zero sample rejected");
    SampleSet out = samples;
    out.normalized = true;
    if (std::abs(ms - 1.0) <= 1e-12)
        return out; // already normalized; keep values bit-identical
    const double inv = 1.0 / std::sqrt(ms);
    for (double& v : out.values)
        v *= inv;
    return out;
}

DensityEstimate kde(const SampleSet& samples, std::size_t grid_size,
                    double bandwidth_override, bool reflect) {
    samples.validate();
    const std::size_t n = samples.values.size();
    if (n < 10)
        throw std::invalid_argument("kde: need at least 10 samples");
    if (grid_size < 2)
        throw std::invalid_argument("kde: grid_size must be >= 2");

    const double x_max = *std::max_element(samples.values.begin(), samples.values.end());
    if (!(x_max > 0.0))
        throw std::invalid_argument("kde: degenerate sample");

    double h = bandwidth_override;
    if (h <= 0.0) {
        double mean = std::accumulate(samples.values.begin(), samples.values.end(), 0.0) /
                      static_cast<double>(n);
        double ss = 0.0;
        for (double v : samples.values)
            ss += (v - mean) * (v - mean);
        const double sd = std::sqrt(ss / static_cast<double>(n - 1));
        std::vector<double> sorted(samples.values);
        std::sort(sorted.begin(), sorted.end());
        const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
        double sigma_hat = sd;
        if (iqr > 0.0)
            sigma_hat = std::min(sd, iqr / 1.349);
        if (!(sigma_hat > 0.0))
            throw std::invalid_argument("kde: zero-variance sample rejected");
        h = sigma_hat * std::pow(4.0 / (3.0 * static_cast<double>(n)), 0.2);
    }

    DensityEstimate out;
    out.bandwidth = h;
    out.grid.resize(grid_size);
    out.density.assign(grid_size, 0.0);
    const double hi = 1.05 * x_max;
    const double step = hi / static_cast<double>(grid_size - 1);
    for (std::size_t i = 0; i < grid_size; ++i)
        out.grid[i] = static_cast<double>(i) * step;

    // Linear binning onto a fine mesh, then kernel sums over the mesh.
    // The mesh is far finer than any plausible bandwidth, so the binning
    // error is orders of magnitude below the estimate's statistical noise.
    const std::size_t n_bins = std::max<std::size_t>(16384, 8 * grid_size);
    const double bin_step = hi / static_cast<double>(n_bins - 1);
    std::vector<double> bin_w(n_bins, 0.0);
    for (double v : samples.values) {
        const double pos = v / bin_step;
        std::size_t lo = static_cast<std::size_t>(pos);
        if (lo >= n_bins - 1)
            lo = n_bins - 2;
        const double frac = pos - static_cast<double>(lo);
        bin_w[lo] += 1.0 - frac;
        bin_w[lo + 1] += frac;
    }

    const double cutoff = 8.5 * h; // Gaussian tail below 4e-17 beyond this
    const double inv_h = 1.0 / h;
    const double norm = 1.0 / (static_cast<double>(n) * h * std::sqrt(2.0 * M_PI));
    for (std::size_t i = 0; i < grid_size; ++i) {
        const double x = out.grid[i];
        const double lo_edge = x - cutoff;
        const double hi_edge = x + cutoff;
        std::size_t b0 = lo_edge <= 0.0 ? 0
                                        : static_cast<std::size_t>(lo_edge / bin_step);
        std::size_t b1 = hi_edge >= hi ? n_bins - 1
                                       : static_cast<std::size_t>(hi_edge / bin_step) + 1;
        double acc = 0.0;
        for (std::size_t b = b0; b <= b1; ++b) {
            if (bin_w[b] == 0.0)
                continue;
            const double u = (x - static_cast<double>(b) * bin_step) * inv_h;
            acc += bin_w[b] * std::exp(-0.5 * u * u);
        }
        if (reflect) {
            // Mirror mass across r = 0.
            for (std::size_t b = 0; b < n_bins; ++b) {
                const double u = (x + static_cast<double>(b) * bin_step) * inv_h;
                if (u > 8.5)
                    break;
                if (bin_w[b] != 0.0)
                    acc += bin_w[b] * std::exp(-0.5 * u * u);
            }
        }
        out.density[i] = acc * norm;
    }

    const double integral = out.trapezoid_integral();
    if (integral < 0.95 || integral > 1.05)
        throw std::runtime_error("kde: density integral outside [0.95, 1.05]");
    return out;
}

CdfEstimate ecdf(const SampleSet& samples) {
    samples.validate();
    CdfEstimate out;
    out.sorted_values = samples.values;
    std::sort(out.sorted_values.begin(), out.sorted_values.end());
    return out;
}

std::vector<double> log_cdf_grid(const SampleSet& samples, int points_per_decade) {
    samples.validate();
    if (points_per_decade < 1)
        throw std::invalid_argument("log_cdf_grid: points_per_decade must be >= 1");
    double lo = 0.0;
    double hi = 0.0;
    for (double v : samples.values) {
        if (v > 0.0 && (lo == 0.0 || v < lo))
            lo = v;
        hi = std::max(hi, v);
    }
    if (lo == 0.0)
        throw std::invalid_argument("log_cdf_grid: needs positive samples");
    const double decades = std::log10(hi / lo);
    const std::size_t n_points = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(decades * points_per_decade)));
    std::vector<double> grid(n_points);
    if (n_points == 1) {
        grid[0] = lo;
        return grid;
    }
    const double log_lo = std::log10(lo);
    const double step = (std::log10(hi) - log_lo) / static_cast<double>(n_points - 1);
    for (std::size_t i = 0; i < n_points; ++i)
        grid[i] = std::pow(10.0, log_lo + static_cast<double>(i) * step);
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

SampleStats prepare_stats(const SampleSet& samples, std::size_t kde_grid_size,
                          int points_per_decade, double bandwidth_override) {
    SampleStats stats;
    stats.samples = samples.normalized ? samples : normalize(samples);
    stats.dens = kde(stats.samples, kde_grid_size, bandwidth_override);
    stats.cdf = ecdf(stats.samples);
    stats.ks_grid = log_cdf_grid(stats.samples, points_per_decade);
    return stats;
}

} // namespace mtwfit
