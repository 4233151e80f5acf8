#include "mtwfit/fitter.hpp"

#include "mtwfit/math/parallel.hpp"
#include "mtwfit/math/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mtwfit {

void SolutionBox::validate() const {
    for (const auto& r : {k_range, delta_range, mu_range})
        if (!(r[0] < r[1]))
            throw std::invalid_argument("SolutionBox: lower bound must be below upper");
    if (k_range[0] < 0.0 || delta_range[0] < 0.0 || delta_range[1] > 1.0 || mu_range[0] <= 0.0)
        throw std::invalid_argument("SolutionBox: bounds outside the parameter domain");
}

bool SolutionBox::contains(const opt::Point3& p) const {
    return p[0] >= k_range[0] && p[0] <= k_range[1] &&
           p[1] >= delta_range[0] && p[1] <= delta_range[1] &&
           p[2] >= mu_range[0] && p[2] <= mu_range[1];
}

double SolutionBox::distance_squared(const opt::Point3& p) const {
    auto axis = [](double v, const std::array<double, 2>& r) {
        if (v < r[0])
            return r[0] - v;
        if (v > r[1])
            return v - r[1];
        return 0.0;
    };
    const double dk = axis(p[0], k_range);
    const double dd = axis(p[1], delta_range);
    const double dm = axis(p[2], mu_range);
    return dk * dk + dd * dd + dm * dm;
}

std::vector<opt::Point3> latin_hypercube(const SolutionBox& box, int n, std::uint64_t seed) {
    if (n < 1)
        throw std::invalid_argument("latin_hypercube: n must be >= 1");
    box.validate();
    math::PhiloxStream rng(seed, 0x1a71b9cbull);
    std::vector<opt::Point3> points(n);
    const std::array<std::array<double, 2>, 3> ranges = {box.k_range, box.delta_range,
                                                         box.mu_range};
    for (int axis = 0; axis < 3; ++axis) {
        std::vector<int> strata(n);
        for (int i = 0; i < n; ++i)
            strata[i] = i;
        for (int i = n - 1; i > 0; --i) {
            const int j = static_cast<int>(rng.next_double() * (i + 1));
            std::swap(strata[i], strata[std::min(j, i)]);
        }
        const double width = (ranges[axis][1] - ranges[axis][0]) / static_cast<double>(n);
        for (int i = 0; i < n; ++i) {
            const double u = rng.next_double();
            points[i][axis] =
                ranges[axis][0] + width * (static_cast<double>(strata[i]) + u);
        }
    }
    return points;
}

FitResult fit(const SampleStats& stats, Criterion criterion, const SolutionBox& box,
              int n_starts, std::uint64_t seed, const opt::NmOptions& options,
              int workers) {
    box.validate();
    if (n_starts < 1)
        throw std::invalid_argument("fit: n_starts must be >= 1");
    if (!stats.samples.normalized)
        throw std::invalid_argument("fit: statistics must come from normalized data");

    auto objective = [&](const opt::Point3& p) {
        if (!box.contains(p))
            return 1e9 * (1.0 + box.distance_squared(p));
        const ParamSet params{p[0], p[1], p[2], 1.0};
        return objective_value(criterion, stats, params);
    };

    const std::vector<opt::Point3> starts = latin_hypercube(box, n_starts, seed);
    std::vector<opt::NmResult> runs(n_starts);
    math::parallel_for(
        static_cast<std::size_t>(n_starts),
        [&](std::size_t i) { runs[i] = opt::nelder_mead(objective, starts[i], options); },
        workers);

    int best = 0;
    for (int i = 1; i < n_starts; ++i)
        if (runs[i].value < runs[best].value)
            best = i;

    FitResult result;
    result.criterion = criterion;
    result.lambda_hat = ParamSet{runs[best].x[0], runs[best].x[1], runs[best].x[2], 1.0};
    result.gof_value = maximizes(criterion) ? -runs[best].value : runs[best].value;
    result.starts = n_starts;
    result.converged = runs[best].converged;
    result.best_start_index = best;
    for (const auto& run : runs)
        result.evaluations += run.evaluations;

    if (!box.contains(runs[best].x))
        throw std::runtime_error("fit: terminal point escaped the solution box");
    return result;
}

} // namespace mtwfit
