#ifndef MTWFIT_MATH_INTERP_HPP
#define MTWFIT_MATH_INTERP_HPP

#include <vector>

namespace mtwfit::math {

/// Shape-preserving cubic Hermite interpolant (Fritsch-Carlson slopes).
/// Monotone data yields a monotone interpolant; queries outside the
/// abscissa range are clamped to the end intervals.
class PchipInterpolant {
  public:
    PchipInterpolant() = default;
    PchipInterpolant(std::vector<double> x, std::vector<double> y);

    double operator()(double x) const;
    std::size_t size() const { return x_.size(); }

  private:
    std::vector<double> x_, y_, d_;
};

} // namespace mtwfit::math

#endif
