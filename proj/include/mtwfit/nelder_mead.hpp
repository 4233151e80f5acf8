#ifndef MTWFIT_NELDER_MEAD_HPP
#define MTWFIT_NELDER_MEAD_HPP

#include <array>
#include <functional>

namespace mtwfit::opt {

using Point3 = std::array<double, 3>;

struct NmOptions {
    double diameter_tol = 1e-7; // max vertex distance at termination
    double fspread_tol = 1e-9;  // max function spread at termination
    int max_iterations = 2000;
};

struct NmResult {
    Point3 x{};
    double value = 0.0;
    int iterations = 0;
    long evaluations = 0;
    bool converged = false;
};

/// Simplex minimizer with reflection 1, expansion 2, contraction 0.5 and
/// shrink 0.5. Terminates once the simplex diameter and the function
/// spread are both below tolerance, or at the iteration cap. The initial
/// simplex perturbs each coordinate by 5% (0.00025 when zero).
NmResult nelder_mead(const std::function<double(const Point3&)>& objective,
                     const Point3& start, const NmOptions& options = {});

} // namespace mtwfit::opt

#endif
