#include "mtwfit/gof.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mtwfit {

namespace {

constexpr double kDensityFloor = 1e-300;

std::vector<double> model_pdf_on(const DensityEstimate& dens, const ParamSet& params) {
    return pdf(params, dens.grid);
}

} // namespace

std::string to_string(Criterion c) {
    switch (c) {
    case Criterion::ml: return "ml";
    case Criterion::mse: return "mse";
    case Criterion::rad: return "rad";
    case Criterion::ks: return "ks";
    }
    throw std::logic_error("unknown criterion");
}

Criterion criterion_from_string(const std::string& name) {
    for (Criterion c : kAllCriteria)
        if (to_string(c) == name)
            return c;
    throw std::invalid_argument("unknown criterion: " + name);
}

bool maximizes(Criterion c) { return c == Criterion::ml; }

double llm(const SampleSet& samples, const ParamSet& params) {
    if (!samples.normalized)
        throw std::invalid_argument("llm: samples must be normalized");
    const std::vector<double> logs = log_pdf(params, samples.values);
    double acc = 0.0, comp = 0.0;
    for (double v : logs) {
        const double term = v - comp;
        const double t = acc + term;
        comp = (t - acc) - term;
        acc = t;
    }
    return acc / static_cast<double>(logs.size());
}

double mse(const DensityEstimate& dens, const ParamSet& params) {
    const std::vector<double> f = model_pdf_on(dens, params);
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double d = dens.density[i] - f[i];
        acc += d * d;
    }
    return acc / static_cast<double>(f.size());
}

double kld(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size())
        throw std::invalid_argument("kld: grids must match");
    if (p.empty())
        throw std::invalid_argument("kld: empty input");
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0)
            continue; // x log x -> 0
        acc += p[i] * std::log(p[i] / std::max(q[i], kDensityFloor));
    }
    return acc / static_cast<double>(p.size());
}

double rad(const DensityEstimate& dens, const ParamSet& params) {
    const std::vector<double> f = model_pdf_on(dens, params);
    const double forward = kld(f, dens.density);
    const double backward = kld(dens.density, f);
    if (forward == 0.0 || backward == 0.0)
        return 0.0;
    return 1.0 / (1.0 / forward + 1.0 / backward);
}

double sup_log10_distance(std::span<const double> f_hat, std::span<const double> f_model) {
    if (f_hat.size() != f_model.size())
        throw std::invalid_argument("sup_log10_distance: length mismatch");
    double sup = 0.0;
    for (std::size_t i = 0; i < f_hat.size(); ++i) {
        const double d = std::abs(std::log10(f_hat[i]) -
                                  std::log10(std::max(f_model[i], kDensityFloor)));
        sup = std::max(sup, d);
    }
    return sup;
}

double ks_log(const CdfEstimate& cdf_est, const ParamSet& params,
              std::span<const double> grid) {
    std::vector<double> f_model = cdf(params, grid);
    std::vector<double> f_hat(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        f_hat[i] = cdf_est(grid[i]);
        if (f_hat[i] <= 0.0)
            throw std::invalid_argument("ks_log: ECDF must be positive on the grid");
    }
    return sup_log10_distance(f_hat, f_model);
}

double evaluate_criterion(Criterion c, const SampleStats& stats, const ParamSet& params) {
    switch (c) {
    case Criterion::ml: return llm(stats.samples, params);
    case Criterion::mse: return mse(stats.dens, params);
    case Criterion::rad: return rad(stats.dens, params);
    case Criterion::ks: return ks_log(stats.cdf, params, stats.ks_grid);
    }
    throw std::logic_error("unknown criterion");
}

double objective_value(Criterion c, const SampleStats& stats, const ParamSet& params) {
    const double v = evaluate_criterion(c, stats, params);
    return maximizes(c) ? -v : v;
}

std::size_t GofTable::best_row(std::size_t metric) const {
    const bool maximize = kAllCriteria[metric] == Criterion::ml;
    std::size_t best = 0;
    for (std::size_t r = 1; r < values.size(); ++r) {
        if (maximize ? values[r][metric] > values[best][metric]
                     : values[r][metric] < values[best][metric])
            best = r;
    }
    return best;
}

std::string GofTable::to_csv() const {
    std::ostringstream os;
    os << "criterion,llm,mse,rad,ks\n";
    os.precision(17);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        os << to_string(rows[r]);
        for (double v : values[r])
            os << ',' << v;
        os << '\n';
    }
    return os.str();
}

std::string GofTable::to_text() const {
    // Metric rows x criterion columns, mirroring the usual report layout.
    std::ostringstream os;
    os << "metric      ";
    for (Criterion c : rows) {
        std::string name = to_string(c);
        for (auto& ch : name) ch = static_cast<char>(::toupper(ch));
        os << "  " << name;
        for (std::size_t i = name.size(); i < 12; ++i) os << ' ';
    }
    os << '\n';
    const char* metric_names[4] = {"L (mean)  ", "eps_MSE   ", "eps_RAD   ", "eps_KS    "};
    for (std::size_t m = 0; m < 4; ++m) {
        os << metric_names[m] << "  ";
        for (std::size_t r = 0; r < rows.size(); ++r) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%12.5e", values[r][m]);
            os << buf << "  ";
        }
        os << '\n';
    }
    return os.str();
}

GofTable cross_table(const SampleStats& stats,
                     const std::map<Criterion, ParamSet>& fits) {
    if (fits.empty())
        throw std::invalid_argument("cross_table: no fits given");
    GofTable table;
    for (Criterion c : kAllCriteria) {
        const auto it = fits.find(c);
        if (it == fits.end())
            continue;
        table.rows.push_back(c);
        std::array<double, 4> row{};
        for (std::size_t m = 0; m < 4; ++m)
            row[m] = evaluate_criterion(kAllCriteria[m], stats, it->second);
        table.values.push_back(row);
    }
    return table;
}

} // namespace mtwfit
