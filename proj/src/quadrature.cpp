#include "mtwfit/math/quadrature.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>

namespace mtwfit::math {

namespace {

// Nodes by Newton iteration on Legendre P_n, seeded with the Chebyshev
// estimate; symmetric pairs are mirrored.
GaussLegendreRule compute_rule(int n) {
    GaussLegendreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) < 1e-15)
                break;
        }
        rule.nodes[i] = -z;
        rule.nodes[n - 1 - i] = z;
        rule.weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        rule.weights[n - 1 - i] = rule.weights[i];
    }
    return rule;
}

// Kronrod 15 / Gauss 7 pair (Patterson coefficients).
constexpr double kK15Nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
constexpr double kK15Weights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double kG7Weights[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct PanelResult {
    double k15;
    double err;
};

PanelResult gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * kK15Nodes[i]);
        fv[14 - i] = f(c + h * kK15Nodes[i]);
    }
    fv[7] = f(c);
    double k15 = kK15Weights[7] * fv[7];
    for (int i = 0; i < 7; ++i)
        k15 += kK15Weights[i] * (fv[i] + fv[14 - i]);
    double g7 = kG7Weights[3] * fv[7];
    for (int i = 0; i < 4; ++i) {
        const int j = 2 * i + 1;
        if (j < 7)
            g7 += kG7Weights[i] * (fv[j] + fv[14 - j]);
    }
    k15 *= h;
    g7 *= h;
    const double diff = std::abs(k15 - g7);
    return {k15, std::pow(200.0 * diff, 1.5) < diff ? std::pow(200.0 * diff, 1.5) : diff};
}

void adapt(const std::function<double(double)>& f, double a, double b,
           const PanelResult& panel, double abs_tol, double rel_tol, int depth,
           QuadratureResult& out) {
    if (panel.err <= abs_tol || panel.err <= rel_tol * std::abs(panel.k15) || depth <= 0) {
        out.value += panel.k15;
        out.error_estimate += panel.err;
        if (depth <= 0 && panel.err > abs_tol && panel.err > rel_tol * std::abs(panel.k15))
            out.converged = false;
        return;
    }
    const double c = 0.5 * (a + b);
    const PanelResult left = gk15(f, a, c);
    const PanelResult right = gk15(f, c, b);
    out.evaluations += 30;
    adapt(f, a, c, left, 0.5 * abs_tol, rel_tol, depth - 1, out);
    adapt(f, c, b, right, 0.5 * abs_tol, rel_tol, depth - 1, out);
}

} // namespace

const GaussLegendreRule& gauss_legendre(int n) {
    if (n < 1)
        throw std::invalid_argument("gauss_legendre: n must be positive");
    static std::map<int, GaussLegendreRule> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end())
        it = cache.emplace(n, compute_rule(n)).first;
    return it->second;
}

QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b,
                                    double abs_tol, double rel_tol, int max_depth) {
    QuadratureResult out;
    if (a == b)
        return out;
    const PanelResult whole = gk15(f, a, b);
    out.evaluations = 15;
    adapt(f, a, b, whole, abs_tol, rel_tol, max_depth, out);
    return out;
}

} // namespace mtwfit::math
