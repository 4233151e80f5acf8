#include "mtwfit/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mtwfit::opt {

namespace {

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;

double distance(const Point3& a, const Point3& b) {
    double acc = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

} // namespace

NmResult nelder_mead(const std::function<double(const Point3&)>& objective,
                     const Point3& start, const NmOptions& options) {
    std::array<Point3, 4> xs;
    std::array<double, 4> fs;
    xs[0] = start;
    for (int i = 0; i < 3; ++i) {
        xs[i + 1] = start;
        xs[i + 1][i] = start[i] != 0.0 ? start[i] * 1.05 : 0.00025;
    }

    NmResult result;
    for (int i = 0; i < 4; ++i) {
        fs[i] = objective(xs[i]);
        ++result.evaluations;
    }
    if (!std::isfinite(fs[0]))
        throw std::invalid_argument("nelder_mead: objective not finite at start");

    auto order = [&] {
        std::array<int, 4> idx = {0, 1, 2, 3};
        std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return fs[a] < fs[b]; });
        const std::array<Point3, 4> tx = xs;
        const std::array<double, 4> tf = fs;
        for (int i = 0; i < 4; ++i) {
            xs[i] = tx[idx[i]];
            fs[i] = tf[idx[i]];
        }
    };
    order();

    auto eval = [&](const Point3& p) {
        ++result.evaluations;
        const double v = objective(p);
        return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
    };

    for (result.iterations = 0; result.iterations < options.max_iterations;
         ++result.iterations) {
        double diameter = 0.0;
        for (int i = 1; i < 4; ++i)
            diameter = std::max(diameter, distance(xs[i], xs[0]));
        const double fspread = std::abs(fs[3] - fs[0]);
        if (diameter < options.diameter_tol && fspread < options.fspread_tol) {
            result.converged = true;
            break;
        }

        Point3 centroid{};
        for (int i = 0; i < 3; ++i)
            centroid[i] = (xs[0][i] + xs[1][i] + xs[2][i]) / 3.0;

        Point3 reflected;
        for (int i = 0; i < 3; ++i)
            reflected[i] = centroid[i] + kReflect * (centroid[i] - xs[3][i]);
        const double f_reflected = eval(reflected);

        if (f_reflected < fs[0]) {
            Point3 expanded;
            for (int i = 0; i < 3; ++i)
                expanded[i] = centroid[i] + kExpand * (reflected[i] - centroid[i]);
            const double f_expanded = eval(expanded);
            if (f_expanded < f_reflected) {
                xs[3] = expanded;
                fs[3] = f_expanded;
            } else {
                xs[3] = reflected;
                fs[3] = f_reflected;
            }
        } else if (f_reflected < fs[2]) {
            xs[3] = reflected;
            fs[3] = f_reflected;
        } else {
            const bool outside = f_reflected < fs[3];
            Point3 contracted;
            const Point3& toward = outside ? reflected : xs[3];
            for (int i = 0; i < 3; ++i)
                contracted[i] = centroid[i] + kContract * (toward[i] - centroid[i]);
            const double f_contracted = eval(contracted);
            if (f_contracted < (outside ? f_reflected : fs[3])) {
                xs[3] = contracted;
                fs[3] = f_contracted;
            } else {
                for (int i = 1; i < 4; ++i) {
                    for (int j = 0; j < 3; ++j)
                        xs[i][j] = xs[0][j] + kShrink * (xs[i][j] - xs[0][j]);
                    fs[i] = eval(xs[i]);
                }
            }
        }
        order();
    }

    result.x = xs[0];
    result.value = fs[0];
    return result;
}

} // namespace mtwfit::opt
