#ifndef MTWFIT_GOF_HPP
#define MTWFIT_GOF_HPP

#include "mtwfit/empirical.hpp"
#include "mtwfit/model.hpp"

#include <array>
#include <map>
#include <span>
#include <string>

namespace mtwfit {

/// The four fitting criteria. ML maximizes the mean log-likelihood; the
/// error metrics are minimized.
enum class Criterion { ml, mse, rad, ks };

inline constexpr std::array<Criterion, 4> kAllCriteria = {
    Criterion::ml, Criterion::mse, Criterion::rad, Criterion::ks};

std::string to_string(Criterion c);
Criterion criterion_from_string(const std::string& name);
bool maximizes(Criterion c);

/// Mean log-likelihood (1/n) sum log f(r_i; lambda). Underflowed densities
/// are floored, never -inf.
double llm(const SampleSet& samples, const ParamSet& params);

/// (1/K) sum_k (fhat(x_k) - f(x_k; lambda))^2 over the density grid.
double mse(const DensityEstimate& dens, const ParamSet& params);

/// Directed Kullback-Leibler sum (1/K) sum p log(p/q) over one shared grid.
/// p = 0 terms contribute zero; q is floored at 1e-300.
double kld(std::span<const double> p, std::span<const double> q);

/// Resistor-average distance: parallel combination of the two directed
/// KLDs between the sample density and the model density on its grid.
/// Returns 0 when either directed term is 0.
double rad(const DensityEstimate& dens, const ParamSet& params);

/// sup_k |log10 Fhat(x_k) - log10 F(x_k; lambda)| over a log-CDF grid.
double ks_log(const CdfEstimate& cdf_est, const ParamSet& params,
              std::span<const double> grid);

/// Supremum log10 distance between two positive CDF tracks (helper shared
/// by ks_log and the scale-awareness property tests).
double sup_log10_distance(std::span<const double> f_hat, std::span<const double> f_model);

double evaluate_criterion(Criterion c, const SampleStats& stats, const ParamSet& params);

/// Criterion recast as a minimization objective (ML negated).
double objective_value(Criterion c, const SampleStats& stats, const ParamSet& params);

/// Cross-criteria table: one row per fitted optimum, one column per metric
/// (mean log-likelihood, MSE, RAD, KS).
struct GofTable {
    std::vector<Criterion> rows;
    std::vector<std::array<double, 4>> values; // [row][metric], metric order = kAllCriteria

    std::string to_csv() const;
    std::string to_text() const;

    /// Index of the best row per metric column (max for the ML column).
    std::size_t best_row(std::size_t metric) const;
};

GofTable cross_table(const SampleStats& stats,
                     const std::map<Criterion, ParamSet>& fits);

} // namespace mtwfit

#endif
