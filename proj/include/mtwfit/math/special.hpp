#ifndef MTWFIT_MATH_SPECIAL_HPP
#define MTWFIT_MATH_SPECIAL_HPP

#include <cstddef>
#include <vector>

namespace mtwfit::math {

/// log( I_nu(z) / (z/2)^nu ) as a function of q = (z/2)^2, valid for
/// nu > -1 and q >= 0. The ratio is an entire function of q with strictly
/// positive Taylor terms, so it stays finite at q = 0 (where the plain
/// Bessel power (z/2)^nu would vanish or blow up for non-zero nu).
double log_bessel_i_ratio(double nu, double q);

/// log I_nu(z) for nu > -1, z >= 0. Never overflows; underflow at z = 0
/// with nu > 0 yields -inf.
double log_bessel_i(double nu, double z);

/// Regularized lower incomplete gamma P(a, y).
double gamma_p(double a, double y);

/// log P(a, y), stable deep in the left tail (y << a) where P underflows.
double log_gamma_p(double a, double y);

/// CDF of a noncentral chi-square mixture expressed in gamma form:
/// sum_j Poisson(j; m) * P(mu + j, y). This is the law of half the
/// noncentral chi-square variable with 2*mu degrees of freedom and
/// noncentrality 2*m, evaluated at y.
double poisson_gamma_mixture_cdf(double mu, double m, double y);

/// lgamma(n) for integer n >= 1, memoized.
double lgamma_int(std::size_t n);

/// Cache of lgamma(j + nu + 1) values for a fixed real offset nu,
/// used by the Bessel ratio series when many evaluations share nu.
class LgammaOffsetCache {
  public:
    explicit LgammaOffsetCache(double nu);
    double operator()(std::size_t j) const;
    double nu() const { return nu_; }

  private:
    double nu_;
    mutable std::vector<double> table_;
};

/// log_bessel_i_ratio with shared lgamma tables; semantics identical.
double log_bessel_i_ratio(double nu, double q, const LgammaOffsetCache& cache);

} // namespace mtwfit::math

#endif
