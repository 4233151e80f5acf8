#include "mtwfit/model.hpp"

#include "mtwfit/math/parallel.hpp"
#include "mtwfit/math/quadrature.hpp"
#include "mtwfit/math/rng.hpp"
#include "mtwfit/math/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mtwfit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_grid(std::span<const double> grid) {
    if (grid.empty())
        throw std::invalid_argument("grid must be non-empty");
    if (grid.front() < 0.0)
        throw std::invalid_argument("grid values must be non-negative");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw std::invalid_argument("grid must be strictly increasing");
}

} // namespace

void ParamSet::validate() const {
    if (!(k >= 0.0) || !std::isfinite(k))
        throw std::invalid_argument("ParamSet: K must be finite and >= 0");
    if (!(delta >= 0.0) || !(delta <= 1.0))
        throw std::invalid_argument("ParamSet: Delta must lie in [0, 1]");
    if (!(mu > 0.0) || !std::isfinite(mu))
        throw std::invalid_argument("ParamSet: mu must be finite and > 0");
    if (!(omega > 0.0) || !std::isfinite(omega))
        throw std::invalid_argument("ParamSet: Omega must be finite and > 0");
}

void PhysicalParams::validate() const {
    if (!(v1 >= 0.0) || !(v2 >= 0.0))
        throw std::invalid_argument("PhysicalParams: amplitudes must be >= 0");
    if (!(v1 >= v2))
        throw std::invalid_argument("PhysicalParams: requires v1 >= v2");
    if (!(sigma2 > 0.0))
        throw std::invalid_argument("PhysicalParams: sigma2 must be > 0");
    if (!(mu > 0.0))
        throw std::invalid_argument("PhysicalParams: mu must be > 0");
}

void SampleSet::validate() const {
    if (values.empty())
        throw std::invalid_argument("SampleSet: values must be non-empty");
    for (double v : values)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw std::invalid_argument("SampleSet: values must be finite and >= 0");
}

double SampleSet::mean_square() const {
    // Kahan summation keeps the normalization invariant at the 1e-12 level
    // for sample sizes up to 1e7 and beyond.
    double sum = 0.0, comp = 0.0;
    for (double v : values) {
        const double term = v * v - comp;
        const double t = sum + term;
        comp = (t - sum) - term;
        sum = t;
    }
    return sum / static_cast<double>(values.size());
}

PhysicalParams physical_from_shape(const ParamSet& params) {
    params.validate();
    PhysicalParams phys;
    phys.mu = params.mu;
    phys.sigma2 = params.omega / (2.0 * params.mu * (1.0 + params.k));
    const double specular = params.omega * params.k / (1.0 + params.k);
    const double root = std::sqrt(std::max(0.0, 1.0 - params.delta * params.delta));
    phys.v1 = std::sqrt(0.5 * specular * (1.0 + root));
    phys.v2 = std::sqrt(0.5 * specular * (1.0 - root));
    return phys;
}

ParamSet shape_from_physical(const PhysicalParams& phys) {
    phys.validate();
    ParamSet params;
    const double specular = phys.v1 * phys.v1 + phys.v2 * phys.v2;
    params.mu = phys.mu;
    params.k = specular / (2.0 * phys.mu * phys.sigma2);
    params.delta = specular > 0.0 ? 2.0 * phys.v1 * phys.v2 / specular : 0.0;
    params.omega = specular + 2.0 * phys.mu * phys.sigma2;
    return params;
}

// ---------------------------------------------------------------------------
// MtwDistribution

MtwDistribution::MtwDistribution(const ParamSet& params, int theta_nodes)
    : params_(params), theta_nodes_(theta_nodes) {
    params_.validate();
    if (theta_nodes < 1)
        throw std::invalid_argument("MtwDistribution: theta_nodes must be >= 1");
    c2_ = params_.mu * (1.0 + params_.k) / params_.omega;

    // Phase-averaged Poisson weights: W_j = (1/pi) sum_i w_i Pois(j; m_i)
    // with m_i = mu K (1 + Delta cos theta_i). They carry the full theta
    // dependence of the conditional kappa-mu laws.
    const auto& rule = math::gauss_legendre(theta_nodes);
    const double mu_k = params_.mu * params_.k;
    double m_max = 0.0;
    std::vector<double> m(theta_nodes);
    for (int i = 0; i < theta_nodes; ++i) {
        const double theta = 0.5 * M_PI * (rule.nodes[i] + 1.0);
        m[i] = mu_k * (1.0 + params_.delta * std::cos(theta));
        m[i] = std::max(0.0, m[i]);
        m_max = std::max(m_max, m[i]);
    }
    const std::size_t j_max =
        static_cast<std::size_t>(std::ceil(m_max + 10.0 * std::sqrt(m_max) + 40.0));
    weights_.assign(j_max + 1, 0.0);
    for (int i = 0; i < theta_nodes; ++i) {
        const double wi = 0.5 * rule.weights[i]; // (pi/2) w_i / pi
        const double mi = m[i];
        if (mi < 1e-300) {
            weights_[0] += wi;
            continue;
        }
        const std::size_t j0 = static_cast<std::size_t>(mi);
        const double log_p0 = j0 * std::log(mi) - mi - math::lgamma_int(j0 + 1);
        const double p0 = std::exp(log_p0);
        double t = p0;
        for (std::size_t j = j0; j <= j_max; ++j) {
            weights_[j] += t;
            t *= mi / static_cast<double>(j + 1);
            if (t < 1e-18 * p0)
                break;
        }
        t = p0;
        for (std::size_t j = j0; j > 0; --j) {
            t *= static_cast<double>(j) / mi;
            weights_[j - 1] += t;
            if (t < 1e-18 * p0)
                break;
        }
    }
}

MtwDistribution::SeriesEval MtwDistribution::series(double y, bool want_cdf) const {
    SeriesEval out{-kInf, 0.0};
    const double mu = params_.mu;
    const std::size_t j_max = weights_.size() - 1;

    if (y <= 0.0)
        return out;

    // Large-y shortcut: every mixture component has essentially all its
    // mass below y, so F = 1 and the density has underflowed.
    if (want_cdf && y > mu + static_cast<double>(j_max) + 20.0 * std::sqrt(y) + 100.0) {
        out.cdf = 1.0;
        return out;
    }

    // g_j = y^(mu+j-1) e^-y / Gamma(mu+j), computed relative to its peak
    // j_g so the scan never overflows; d_j = g_{j+1} doubles as the
    // increment of the regularized gamma recurrence.
    const double log_y = std::log(y);
    const std::size_t j_g = static_cast<std::size_t>(
        std::clamp(y - mu + 1.0, 0.0, static_cast<double>(j_max)));
    const double anchor =
        (mu + static_cast<double>(j_g) - 1.0) * log_y - y -
        std::lgamma(mu + static_cast<double>(j_g));

    thread_local std::vector<double> g_rel;
    g_rel.assign(j_max + 2, 0.0);
    g_rel[j_g] = 1.0;
    for (std::size_t j = j_g; j >= 1; --j) {
        g_rel[j - 1] = g_rel[j] * (mu + static_cast<double>(j) - 1.0) / y;
        if (g_rel[j - 1] == 0.0)
            break;
    }
    for (std::size_t j = j_g; j <= j_max; ++j) {
        g_rel[j + 1] = g_rel[j] * y / (mu + static_cast<double>(j));
        if (g_rel[j + 1] == 0.0 && j > j_g)
            break;
    }

    double pdf_rel = 0.0;
    for (std::size_t j = 0; j <= j_max; ++j)
        pdf_rel += weights_[j] * g_rel[j];
    if (pdf_rel > 0.0)
        out.log_pdf_series = anchor + std::log(pdf_rel);

    if (want_cdf) {
        // P(mu+j+1, y) = P(mu+j, y) - d_j with d_j = e^-y y^(mu+j)/Gamma(mu+j+1).
        // The d_j are bounded by 1 and unimodal; anchoring at their own peak
        // keeps the scaled scan representable for every (mu, y).
        const std::size_t j_d = static_cast<std::size_t>(
            std::clamp(y - mu, 0.0, static_cast<double>(j_max)));
        const double anchor_d = (mu + static_cast<double>(j_d)) * log_y - y -
                                std::lgamma(mu + static_cast<double>(j_d) + 1.0);
        thread_local std::vector<double> d_rel;
        d_rel.assign(j_max + 1, 0.0);
        d_rel[j_d] = 1.0;
        for (std::size_t j = j_d; j >= 1; --j) {
            d_rel[j - 1] = d_rel[j] * (mu + static_cast<double>(j)) / y;
            if (d_rel[j - 1] == 0.0)
                break;
        }
        for (std::size_t j = j_d; j < j_max; ++j) {
            d_rel[j + 1] = d_rel[j] * y / (mu + static_cast<double>(j) + 1.0);
            if (d_rel[j + 1] == 0.0)
                break;
        }
        const double d_scale = std::exp(anchor_d);
        double p = math::gamma_p(mu, y);
        double acc = 0.0;
        for (std::size_t j = 0; j <= j_max; ++j) {
            acc += weights_[j] * p;
            p -= d_scale * d_rel[j];
            if (p <= 0.0)
                break;
        }
        out.cdf = std::min(acc, 1.0);
    }
    return out;
}

double MtwDistribution::log_pdf_regular(double x) const {
    const double mu = params_.mu;
    if (x == 0.0) {
        // Limit of log f - (2 mu - 1) log x: only the j = 0 component
        // survives, giving log(2 c2^mu W_0 / Gamma(mu)).
        return std::log(2.0) + mu * std::log(c2_) + std::log(weights_[0]) -
               std::lgamma(mu);
    }
    const double y = c2_ * x * x;
    const SeriesEval ev = series(y, false);
    // log f = log(2 c2 x) + log S_p; subtract (2 mu - 1) log x and fold the
    // y^(mu-1) power into explicit form via S_p's anchor already holding it.
    return std::log(2.0 * c2_) + ev.log_pdf_series - (2.0 * mu - 2.0) * std::log(x);
}

double MtwDistribution::log_pdf(double x) const {
    if (!(x >= 0.0))
        throw std::invalid_argument("log_pdf: points must be >= 0");
    if (x == 0.0)
        return kLogPdfFloor;
    const double y = c2_ * x * x;
    const SeriesEval ev = series(y, false);
    const double lf = std::log(2.0 * c2_ * x) + ev.log_pdf_series;
    return std::max(lf, kLogPdfFloor);
}

double MtwDistribution::pdf(double x) const {
    if (!(x >= 0.0))
        throw std::invalid_argument("pdf: grid values must be >= 0");
    if (x == 0.0) {
        // x^(2 mu - 1) prefactor: zero above mu = 1/2, finite at mu = 1/2.
        // The mu < 1/2 pole is reported as 0 by convention.
        if (params_.mu == 0.5)
            return std::exp(log_pdf_regular(0.0));
        return 0.0;
    }
    const double y = c2_ * x * x;
    const SeriesEval ev = series(y, false);
    return std::exp(std::log(2.0 * c2_ * x) + ev.log_pdf_series);
}

double MtwDistribution::cdf(double x) const {
    if (!(x >= 0.0))
        throw std::invalid_argument("cdf: grid values must be >= 0");
    if (x == 0.0)
        return 0.0;
    return series(c2_ * x * x, true).cdf;
}

std::vector<double> MtwDistribution::pdf(std::span<const double> grid) const {
    check_grid(grid);
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        out[i] = pdf(grid[i]);
    return out;
}

std::vector<double> MtwDistribution::cdf(std::span<const double> grid) const {
    check_grid(grid);
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        out[i] = cdf(grid[i]);
    return out;
}

std::vector<double> pdf(const ParamSet& params, std::span<const double> grid,
                        int theta_nodes) {
    return MtwDistribution(params, theta_nodes).pdf(grid);
}

std::vector<double> cdf(const ParamSet& params, std::span<const double> grid,
                        int theta_nodes) {
    return MtwDistribution(params, theta_nodes).cdf(grid);
}

// ---------------------------------------------------------------------------
// Sampler

SampleSet sample_envelope(const ParamSet& params, std::size_t n, std::uint64_t seed,
                          int workers) {
    params.validate();
    if (n == 0)
        throw std::invalid_argument("sample_envelope: n must be >= 1");

    const PhysicalParams phys = physical_from_shape(params);
    const double sigma = std::sqrt(phys.sigma2);
    const double scale = 2.0 * phys.sigma2;
    const double mu = params.mu;

    SampleSet out;
    out.values.resize(n);
    out.source = std::string("sample_envelope/") + math::PhiloxStream::kName;
    out.seed = seed;

    math::parallel_chunks(
        n,
        [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                math::PhiloxStream rng(seed, i);
                const double phi1 = 2.0 * M_PI * rng.next_double();
                const double phi2 = 2.0 * M_PI * rng.next_double();
                const double a_re = phys.v1 * std::cos(phi1) + phys.v2 * std::cos(phi2);
                const double a_im = phys.v1 * std::sin(phi1) + phys.v2 * std::sin(phi2);
                double p;
                if (mu >= 1.0) {
                    const double z_re = a_re + sigma * rng.next_normal();
                    const double z_im = a_im + sigma * rng.next_normal();
                    p = z_re * z_re + z_im * z_im;
                    if (mu > 1.0)
                        p += rng.next_gamma(mu - 1.0, scale);
                } else {
                    // Fractional cluster count: the conditional law is a
                    // noncentral chi-square with 2 mu degrees of freedom,
                    // realized through its Poisson-gamma mixture.
                    const double s2 = a_re * a_re + a_im * a_im;
                    const long j = rng.next_poisson(s2 / scale);
                    p = rng.next_gamma(mu + static_cast<double>(j), scale);
                }
                out.values[i] = std::sqrt(p);
            }
        },
        workers);
    return out;
}

// ---------------------------------------------------------------------------
// Dense-grid log-density

LogPdfInterpolant::LogPdfInterpolant(const ParamSet& params, double x_max,
                                     std::size_t grid_size, int theta_nodes) {
    params.validate();
    if (!(x_max > 0.0))
        throw std::invalid_argument("LogPdfInterpolant: x_max must be > 0");
    if (grid_size < 16)
        throw std::invalid_argument("LogPdfInterpolant: grid too small");
    two_mu_minus_one_ = 2.0 * params.mu - 1.0;
    x_max_ = x_max;

    const MtwDistribution dist(params, theta_nodes);
    std::vector<double> xs(grid_size), gs(grid_size);
    const double step = x_max / static_cast<double>(grid_size - 1);
    for (std::size_t i = 0; i < grid_size; ++i) {
        xs[i] = static_cast<double>(i) * step;
        gs[i] = dist.log_pdf_regular(xs[i]);
        if (!std::isfinite(gs[i]))
            gs[i] = kLogPdfFloor; // deep tail; clamp keeps pchip finite
    }
    regular_ = math::PchipInterpolant(std::move(xs), std::move(gs));
}

double LogPdfInterpolant::operator()(double x) const {
    if (!(x >= 0.0))
        throw std::invalid_argument("log_pdf: points must be >= 0");
    if (x == 0.0)
        return kLogPdfFloor;
    const double lf = regular_(std::min(x, x_max_)) + two_mu_minus_one_ * std::log(x);
    return std::isfinite(lf) ? std::max(lf, kLogPdfFloor) : kLogPdfFloor;
}

std::vector<double> log_pdf(const ParamSet& params, std::span<const double> points,
                            std::size_t grid_size, int theta_nodes) {
    double x_max = 0.0;
    for (double p : points) {
        if (!(p >= 0.0))
            throw std::invalid_argument("log_pdf: points must be >= 0");
        x_max = std::max(x_max, p);
    }
    if (x_max == 0.0)
        x_max = 1.0;
    const LogPdfInterpolant interp(params, 1.05 * x_max, grid_size, theta_nodes);
    std::vector<double> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        out[i] = interp(points[i]);
    return out;
}

std::vector<double> log_pdf_direct(const ParamSet& params, std::span<const double> points,
                                   int theta_nodes) {
    const MtwDistribution dist(params, theta_nodes);
    std::vector<double> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        out[i] = dist.log_pdf(points[i]);
    return out;
}

// ---------------------------------------------------------------------------
// Per-node reference route (conditional kappa-mu in log form + log-sum-exp)

namespace {

struct NodeParams {
    double m;  // mu kappa(theta)
    double w;  // Gauss-Legendre weight / pi
};

std::vector<NodeParams> theta_nodes_for(const ParamSet& params, int n) {
    const auto& rule = math::gauss_legendre(n);
    std::vector<NodeParams> nodes(n);
    for (int i = 0; i < n; ++i) {
        const double theta = 0.5 * M_PI * (rule.nodes[i] + 1.0);
        nodes[i].m = std::max(0.0, params.mu * params.k *
                                       (1.0 + params.delta * std::cos(theta)));
        nodes[i].w = 0.5 * rule.weights[i];
    }
    return nodes;
}

} // namespace

double pdf_theta_reference(const ParamSet& params, double x, int theta_nodes) {
    params.validate();
    if (!(x >= 0.0))
        throw std::invalid_argument("pdf_theta_reference: x must be >= 0");
    if (x == 0.0)
        return 0.0;
    const double mu = params.mu;
    const double c2 = mu * (1.0 + params.k) / params.omega;
    const auto nodes = theta_nodes_for(params, theta_nodes);
    const math::LgammaOffsetCache cache(mu - 1.0);

    // Conditional kappa-mu log-density via the scaled Bessel ratio:
    // log f = log 2 + (2mu-1) log x + mu log c2 - m - c2 x^2 + logIr(mu-1, m c2 x^2)
    std::vector<double> logs(nodes.size());
    const double base = std::log(2.0) + (2.0 * mu - 1.0) * std::log(x) +
                        mu * std::log(c2) - c2 * x * x;
    double max_log = -kInf;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double q = nodes[i].m * c2 * x * x;
        logs[i] = base - nodes[i].m + math::log_bessel_i_ratio(mu - 1.0, q, cache);
        max_log = std::max(max_log, logs[i]);
    }
    if (max_log == -kInf)
        return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        acc += nodes[i].w * std::exp(logs[i] - max_log);
    return std::exp(max_log) * acc;
}

double cdf_theta_reference(const ParamSet& params, double x, int theta_nodes) {
    params.validate();
    if (!(x >= 0.0))
        throw std::invalid_argument("cdf_theta_reference: x must be >= 0");
    if (x == 0.0)
        return 0.0;
    const double c2 = params.mu * (1.0 + params.k) / params.omega;
    const double y = c2 * x * x;
    const auto nodes = theta_nodes_for(params, theta_nodes);
    double acc = 0.0;
    for (const auto& node : nodes)
        acc += node.w * math::poisson_gamma_mixture_cdf(params.mu, node.m, y);
    return std::min(acc, 1.0);
}

} // namespace mtwfit
