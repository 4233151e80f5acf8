#include "mtwfit/performance.hpp"

#include "mtwfit/math/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mtwfit {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double value) { return 10.0 * std::log10(value); }

std::vector<double> PerfConfig::default_grid() {
    std::vector<double> grid;
    for (int i = 0; i <= 80; ++i)
        grid.push_back(0.5 * static_cast<double>(i));
    return grid;
}

PerfConfig PerfConfig::defaults() {
    PerfConfig config;
    config.gamma_bar_db = default_grid();
    return config;
}

namespace {

constexpr double kLog2e = 1.4426950408889634;

// Envelope beyond which the model carries < 1e-13 probability mass; the
// capacity integrand grows only logarithmically, so the discarded tail is
// far below the 1e-8 budget.
double tail_cutoff(const MtwDistribution& dist) {
    double hi = 4.0 * std::sqrt(dist.params().omega);
    while (dist.cdf(hi) < 1.0 - 1e-13)
        hi *= 1.25;
    return hi;
}

} // namespace

double ec_model(const ParamSet& params, double gamma_bar_linear) {
    params.validate();
    if (!(gamma_bar_linear > 0.0))
        throw std::invalid_argument("ec_model: gamma_bar must be > 0");
    const MtwDistribution dist(params);
    const double hi = tail_cutoff(dist);
    const double snr_scale = gamma_bar_linear / params.omega;
    const auto result = math::integrate_adaptive(
        [&](double x) {
            return kLog2e * std::log1p(snr_scale * x * x) * dist.pdf(x);
        },
        0.0, hi, 1e-10, 1e-10);
    return result.value;
}

double ec_empirical(const SampleSet& samples, double gamma_bar_linear) {
    samples.validate();
    if (!(gamma_bar_linear >= 0.0))
        throw std::invalid_argument("ec_empirical: gamma_bar must be >= 0");
    if (gamma_bar_linear == 0.0)
        return 0.0;
    const double omega_hat = samples.normalized ? 1.0 : samples.mean_square();
    const double snr_scale = gamma_bar_linear / omega_hat;
    double acc = 0.0, comp = 0.0;
    for (double r : samples.values) {
        const double term = kLog2e * std::log1p(snr_scale * r * r) - comp;
        const double t = acc + term;
        comp = (t - acc) - term;
        acc = t;
    }
    return acc / static_cast<double>(samples.values.size());
}

double op_model(const ParamSet& params, double gamma_bar_linear, const PerfConfig& config) {
    params.validate();
    if (!(gamma_bar_linear > 0.0))
        throw std::invalid_argument("op_model: gamma_bar must be > 0");
    const double threshold = std::sqrt(config.gamma_th() * params.omega / gamma_bar_linear);
    return MtwDistribution(params).cdf(threshold);
}

OpEstimate op_empirical(const SampleSet& samples, double gamma_bar_linear,
                        const PerfConfig& config) {
    samples.validate();
    if (!(gamma_bar_linear > 0.0))
        throw std::invalid_argument("op_empirical: gamma_bar must be > 0");
    const double omega_hat = samples.normalized ? 1.0 : samples.mean_square();
    const double threshold2 = config.gamma_th() * omega_hat / gamma_bar_linear;
    std::size_t count = 0;
    for (double r : samples.values)
        if (r * r < threshold2)
            ++count;
    OpEstimate out;
    if (count < 100) {
        out.low_support = true;
        out.value = 0.0;
    } else {
        out.value = static_cast<double>(count) / static_cast<double>(samples.values.size());
    }
    return out;
}

void PerfCurve::validate() const {
    if (gamma_bar_db.empty())
        throw std::invalid_argument("PerfCurve: empty grid");
    for (std::size_t i = 1; i < gamma_bar_db.size(); ++i)
        if (!(gamma_bar_db[i] > gamma_bar_db[i - 1]))
            throw std::invalid_argument("PerfCurve: grid must increase");
    for (std::size_t i = 0; i < op.size(); ++i) {
        if (op[i] < 0.0 || op[i] > 1.0 || ec[i] < 0.0)
            throw std::invalid_argument("PerfCurve: values out of range");
        if (i > 0 && op[i] > op[i - 1] + 1e-12)
            throw std::invalid_argument("PerfCurve: OP must be non-increasing");
        if (i > 0 && ec[i] + 1e-12 < ec[i - 1])
            throw std::invalid_argument("PerfCurve: EC must be non-decreasing");
    }
}

PerfCurve sweep(const ParamSet& params, const PerfConfig& config) {
    if (config.gamma_bar_db.empty())
        throw std::invalid_argument("sweep: empty SNR grid");
    PerfCurve curve;
    curve.gamma_bar_db = config.gamma_bar_db;
    curve.ec.resize(config.gamma_bar_db.size());
    curve.op.resize(config.gamma_bar_db.size());
    curve.source = "model";
    const MtwDistribution dist(params);
    const double hi = tail_cutoff(dist);
    const double gamma_th = config.gamma_th();
    for (std::size_t i = 0; i < config.gamma_bar_db.size(); ++i) {
        const double gbar = db_to_linear(config.gamma_bar_db[i]);
        const double snr_scale = gbar / params.omega;
        curve.ec[i] = math::integrate_adaptive(
                          [&](double x) {
                              return kLog2e * std::log1p(snr_scale * x * x) * dist.pdf(x);
                          },
                          0.0, hi, 1e-10, 1e-10)
                          .value;
        curve.op[i] = dist.cdf(std::sqrt(gamma_th * params.omega / gbar));
    }
    return curve;
}

PerfCurve sweep(const SampleSet& samples, const PerfConfig& config) {
    if (config.gamma_bar_db.empty())
        throw std::invalid_argument("sweep: empty SNR grid");
    PerfCurve curve;
    curve.gamma_bar_db = config.gamma_bar_db;
    curve.ec.resize(config.gamma_bar_db.size());
    curve.op.resize(config.gamma_bar_db.size());
    curve.op_low_support.resize(config.gamma_bar_db.size());
    curve.source = "empirical";
    for (std::size_t i = 0; i < config.gamma_bar_db.size(); ++i) {
        const double gbar = db_to_linear(config.gamma_bar_db[i]);
        curve.ec[i] = ec_empirical(samples, gbar);
        const OpEstimate op = op_empirical(samples, gbar, config);
        curve.op[i] = op.value;
        curve.op_low_support[i] = op.low_support ? 1 : 0;
    }
    return curve;
}

double operational_snr(const PerfCurve& curve, double target_op) {
    if (!(target_op > 0.0) || !(target_op < 1.0))
        throw std::invalid_argument("operational_snr: target must lie in (0, 1)");
    const std::size_t n = curve.op.size();
    if (n < 2)
        throw std::invalid_argument("operational_snr: curve too short");
    for (std::size_t i = 1; i < n; ++i)
        if (curve.op[i] > curve.op[i - 1] + 1e-12)
            throw std::invalid_argument("operational_snr: OP must be non-increasing");

    // Usable prefix: positive OP values (flagged empirical tail points are 0).
    std::size_t m = n;
    while (m > 0 && curve.op[m - 1] <= 0.0)
        --m;
    if (m == 0 || curve.op[0] < target_op)
        throw std::out_of_range("operational_snr: target above the curve's OP range");

    auto interpolate = [&](std::size_t i, std::size_t j) {
        const double l0 = std::log10(curve.op[i]);
        const double l1 = std::log10(curve.op[j]);
        const double t = (l0 - std::log10(target_op)) / (l0 - l1);
        return curve.gamma_bar_db[i] + t * (curve.gamma_bar_db[j] - curve.gamma_bar_db[i]);
    };

    for (std::size_t j = 1; j < m; ++j) {
        if (curve.op[j] <= target_op)
            return interpolate(j - 1, j);
    }

    // Crossing beyond the last reliable point. If a flagged point follows,
    // its true OP is below 100/n <= target, so the crossing lies within one
    // grid step; extend the last decreasing segment and cap there.
    if (m < n) {
        std::size_t i = m - 1;
        while (i > 0 && !(curve.op[i - 1] > curve.op[i]))
            --i;
        if (i > 0) {
            const double extrapolated = interpolate(i - 1, i);
            return std::clamp(extrapolated, curve.gamma_bar_db[m - 1],
                              curve.gamma_bar_db[m]);
        }
    }
    throw std::out_of_range("operational_snr: target below the curve's OP range");
}

} // namespace mtwfit
