#ifndef MTWFIT_MATH_QUADRATURE_HPP
#define MTWFIT_MATH_QUADRATURE_HPP

#include <functional>
#include <vector>

namespace mtwfit::math {

struct GaussLegendreRule {
    std::vector<double> nodes;   // on (-1, 1), ascending
    std::vector<double> weights; // sum to 2
};

/// n-point Gauss-Legendre rule on (-1, 1); cached per n.
const GaussLegendreRule& gauss_legendre(int n);

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    long evaluations = 0;
    bool converged = true;
};

/// Adaptive Gauss-Kronrod (G7, K15) with recursive bisection. Stops when
/// the local error estimate satisfies abs_tol/rel_tol or max_depth is hit.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b,
                                    double abs_tol = 1e-10,
                                    double rel_tol = 1e-10,
                                    int max_depth = 48);

} // namespace mtwfit::math

#endif
