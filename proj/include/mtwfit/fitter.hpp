#ifndef MTWFIT_FITTER_HPP
#define MTWFIT_FITTER_HPP

#include "mtwfit/gof.hpp"
#include "mtwfit/nelder_mead.hpp"

#include <cstdint>

namespace mtwfit {

/// Bounded solution space for the (K, Delta, mu) estimate.
struct SolutionBox {
    std::array<double, 2> k_range = {0.1, 45.0};
    std::array<double, 2> delta_range = {0.0, 1.0};
    std::array<double, 2> mu_range = {0.1, 6.0};

    void validate() const;
    bool contains(const opt::Point3& p) const;
    /// Squared Euclidean distance to the box (0 inside).
    double distance_squared(const opt::Point3& p) const;
};

struct FitResult {
    Criterion criterion = Criterion::mse;
    ParamSet lambda_hat;   // omega pinned to 1 for normalized data
    double gof_value = 0.0;
    int starts = 0;
    bool converged = false;
    long evaluations = 0;
    int best_start_index = 0;
};

/// Latin hypercube start points over the box, reproducible from the seed.
std::vector<opt::Point3> latin_hypercube(const SolutionBox& box, int n, std::uint64_t seed);

/// Multistart Nelder-Mead over the criterion. Out-of-box trial points are
/// scored 1e9 (1 + squared distance to the box), so every terminal point
/// is feasible. Starts run concurrently; the best terminal value wins with
/// ties broken by the lowest start index.
FitResult fit(const SampleStats& stats, Criterion criterion,
              const SolutionBox& box = {}, int n_starts = 8,
              std::uint64_t seed = 0x6d74770ull,
              const opt::NmOptions& options = {}, int workers = 0);

} // namespace mtwfit

#endif
