#include "mtwfit/math/special.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>

namespace mtwfit::math {

namespace {

constexpr double kRelCutoff = 1e-17;

// Large-argument expansion of I_nu(z); accurate below 1e-14 once z is
// past ~50 for the orders used here (|nu| <= ~8). The series is summed
// until terms stop decreasing or fall below the relative cutoff.
double log_bessel_i_asymptotic(double nu, double z) {
    const double four_nu2 = 4.0 * nu * nu;
    double term = 1.0;
    double sum = 1.0;
    double prev_mag = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 60; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= -(four_nu2 - odd * odd) / (8.0 * k * z);
        const double mag = std::abs(term);
        if (mag >= prev_mag)
            break;
        sum += term;
        prev_mag = mag;
        if (mag < kRelCutoff * std::abs(sum))
            break;
    }
    return z - 0.5 * std::log(2.0 * M_PI * z) + std::log(sum);
}

// Peak index of the series sum_j q^j / (j! Gamma(j+nu+1)).
std::size_t series_peak(double nu, double q) {
    const double j = 0.5 * (-(nu + 2.0) + std::sqrt(nu * nu + 4.0 * q));
    return j > 0.0 ? static_cast<std::size_t>(j) : 0;
}

template <typename LgammaNu>
double log_bessel_i_ratio_series(double nu, double q, LgammaNu&& lg_nu) {
    const std::size_t j0 = series_peak(nu, q);
    const double log_q = std::log(q);
    const double log_t0 =
        static_cast<double>(j0) * log_q - lgamma_int(j0 + 1) - lg_nu(j0);

    double sum = 1.0;
    double t = 1.0;
    for (double j = static_cast<double>(j0);; j += 1.0) {
        t *= q / ((j + 1.0) * (j + nu + 1.0));
        sum += t;
        if (t < kRelCutoff * sum)
            break;
    }
    t = 1.0;
    for (double j = static_cast<double>(j0); j > 0.0; j -= 1.0) {
        t *= j * (j + nu) / q;
        sum += t;
        if (t < kRelCutoff * sum)
            break;
    }
    return log_t0 + std::log(sum);
}

} // namespace

double lgamma_int(std::size_t n) {
    constexpr std::size_t kTableSize = 8192;
    static std::vector<double> table = [] {
        std::vector<double> t(kTableSize);
        for (std::size_t i = 1; i < kTableSize; ++i)
            t[i] = std::lgamma(static_cast<double>(i));
        return t;
    }();
    if (n < kTableSize)
        return table[n];
    return std::lgamma(static_cast<double>(n));
}

LgammaOffsetCache::LgammaOffsetCache(double nu) : nu_(nu) { table_.reserve(256); }

double LgammaOffsetCache::operator()(std::size_t j) const {
    if (j >= table_.size()) {
        const std::size_t old = table_.size();
        table_.resize(std::max<std::size_t>(2 * (j + 1), 64));
        for (std::size_t i = old; i < table_.size(); ++i)
            table_[i] = std::lgamma(static_cast<double>(i) + nu_ + 1.0);
    }
    return table_[j];
}

double log_bessel_i_ratio(double nu, double q) {
    if (!(nu > -1.0))
        throw std::invalid_argument("log_bessel_i_ratio: nu must exceed -1");
    if (!(q >= 0.0))
        throw std::invalid_argument("log_bessel_i_ratio: q must be non-negative");
    if (q == 0.0)
        return -std::lgamma(nu + 1.0);
    const double z = 2.0 * std::sqrt(q);
    if (z > std::max(100.0, nu * nu))
        return log_bessel_i_asymptotic(nu, z) - 0.5 * nu * std::log(q);
    return log_bessel_i_ratio_series(
        nu, q, [nu](std::size_t j) { return std::lgamma(static_cast<double>(j) + nu + 1.0); });
}

double log_bessel_i_ratio(double nu, double q, const LgammaOffsetCache& cache) {
    if (q == 0.0)
        return -cache(0);
    const double z = 2.0 * std::sqrt(q);
    if (z > std::max(100.0, nu * nu))
        return log_bessel_i_asymptotic(nu, z) - 0.5 * nu * std::log(q);
    return log_bessel_i_ratio_series(nu, q, cache);
}

double log_bessel_i(double nu, double z) {
    if (!(z >= 0.0))
        throw std::invalid_argument("log_bessel_i: z must be non-negative");
    if (z == 0.0) {
        if (nu == 0.0)
            return 0.0;
        return nu > 0.0 ? -std::numeric_limits<double>::infinity()
                        : std::numeric_limits<double>::infinity();
    }
    const double q = 0.25 * z * z;
    return nu * std::log(0.5 * z) + log_bessel_i_ratio(nu, q);
}

double gamma_p(double a, double y) {
    if (y <= 0.0)
        return 0.0;
    return boost::math::gamma_p(a, y);
}

double log_gamma_p(double a, double y) {
    if (y <= 0.0)
        return -std::numeric_limits<double>::infinity();
    if (y < a + 1.0) {
        // P(a,y) = y^a e^-y / Gamma(a+1) * sum_k y^k / prod_{i<=k}(a+i)
        double term = 1.0;
        double sum = 1.0;
        for (int k = 1; k < 4000; ++k) {
            term *= y / (a + static_cast<double>(k));
            sum += term;
            if (term < kRelCutoff * sum)
                break;
        }
        return a * std::log(y) - y - std::lgamma(a + 1.0) + std::log(sum);
    }
    return std::log(boost::math::gamma_p(a, y));
}

double poisson_gamma_mixture_cdf(double mu, double m, double y) {
    if (y <= 0.0)
        return 0.0;
    if (m < 1e-14)
        return gamma_p(mu, y);

    // Peak of the product Poisson(j; m) * P(mu + j, y): the Poisson kernel
    // peaks at j ~ m while the gamma tail factor pushes it down toward
    // j ~ sqrt(m y) when y is small.
    const double j_gamma = 0.5 * (-(mu + 2.0) + std::sqrt(mu * mu + 4.0 * m * y));
    double j_est = std::min(m, std::max(0.0, j_gamma));
    std::size_t j0 = static_cast<std::size_t>(j_est);

    const double log_m = std::log(m);
    auto log_pois = [&](std::size_t j) {
        return static_cast<double>(j) * log_m - m - lgamma_int(j + 1);
    };
    auto log_term = [&](std::size_t j) {
        return log_pois(j) + log_gamma_p(mu + static_cast<double>(j), y);
    };

    // Local hill climb in case the analytic estimate is off by a few.
    double lt0 = log_term(j0);
    for (;;) {
        const double up = log_term(j0 + 1);
        if (up > lt0) {
            ++j0;
            lt0 = up;
            continue;
        }
        if (j0 > 0) {
            const double down = log_term(j0 - 1);
            if (down > lt0) {
                --j0;
                lt0 = down;
                continue;
            }
        }
        break;
    }

    if (lt0 == -std::numeric_limits<double>::infinity())
        return 0.0;

    // Sum outward from the peak; all bookkeeping is relative to the peak
    // term so the running quantities stay in a safe range.
    const double p0 = std::exp(log_gamma_p(mu + static_cast<double>(j0), y));
    const double w0 = std::exp(log_pois(j0));

    double sum = p0 * w0;

    // Upward: P(a+1,y) = P(a,y) - d(a), d(a) = e^-y y^a / Gamma(a+1).
    {
        double p = p0;
        double d = std::exp(-y + (mu + static_cast<double>(j0)) * std::log(y) -
                            std::lgamma(mu + static_cast<double>(j0) + 1.0));
        double w = w0;
        for (double j = static_cast<double>(j0);; j += 1.0) {
            p -= d;
            if (p <= 0.0)
                break;
            d *= y / (mu + j + 1.0);
            w *= m / (j + 1.0);
            const double t = w * p;
            sum += t;
            if (t < kRelCutoff * sum)
                break;
        }
    }
    // Downward: P(a-1,y) = P(a,y) + d(a-1).
    if (j0 > 0) {
        double p = p0;
        double d = std::exp(-y + (mu + static_cast<double>(j0) - 1.0) * std::log(y) -
                            std::lgamma(mu + static_cast<double>(j0)));
        double w = w0;
        for (double j = static_cast<double>(j0); j > 0.0; j -= 1.0) {
            p += d;
            w *= j / m;
            const double t = w * p;
            sum += t;
            if (t < kRelCutoff * sum)
                break;
            d *= (mu + j - 1.0) / y;
        }
    }
    return std::min(sum, 1.0);
}

} // namespace mtwfit::math
