// Python bindings for the mtwfit core: model evaluation and sampling,
// empirical statistics, the four fitting criteria, the bounded fitter and
// the performance benchmarks.

#include "mtwfit/empirical.hpp"
#include "mtwfit/fitter.hpp"
#include "mtwfit/gof.hpp"
#include "mtwfit/model.hpp"
#include "mtwfit/performance.hpp"
#include "mtwfit/pipeline.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace mtwfit;

PYBIND11_MODULE(_core, m) {
    m.doc() = "MTW fading-model fitting toolkit (C++ core)";

    py::class_<ParamSet>(m, "ParamSet")
        .def(py::init([](double k, double delta, double mu, double omega) {
                 ParamSet p{k, delta, mu, omega};
                 p.validate();
                 return p;
             }),
             py::arg("k"), py::arg("delta"), py::arg("mu"), py::arg("omega") = 1.0)
        .def_readwrite("k", &ParamSet::k)
        .def_readwrite("delta", &ParamSet::delta)
        .def_readwrite("mu", &ParamSet::mu)
        .def_readwrite("omega", &ParamSet::omega)
        .def("__repr__", [](const ParamSet& p) {
            return "ParamSet(k=" + std::to_string(p.k) + ", delta=" + std::to_string(p.delta) +
                   ", mu=" + std::to_string(p.mu) + ", omega=" + std::to_string(p.omega) + ")";
        });

    py::class_<PhysicalParams>(m, "PhysicalParams")
        .def(py::init([](double v1, double v2, double sigma2, double mu) {
                 PhysicalParams p{v1, v2, sigma2, mu};
                 p.validate();
                 return p;
             }),
             py::arg("v1"), py::arg("v2"), py::arg("sigma2"), py::arg("mu"))
        .def_readwrite("v1", &PhysicalParams::v1)
        .def_readwrite("v2", &PhysicalParams::v2)
        .def_readwrite("sigma2", &PhysicalParams::sigma2)
        .def_readwrite("mu", &PhysicalParams::mu);

    py::class_<SampleSet>(m, "SampleSet")
        .def(py::init([](std::vector<double> values, bool normalized, std::string source) {
                 SampleSet s{std::move(values), normalized, std::move(source), {}};
                 s.validate();
                 return s;
             }),
             py::arg("values"), py::arg("normalized") = false, py::arg("source") = "python")
        .def_readonly("values", &SampleSet::values)
        .def_readonly("normalized", &SampleSet::normalized)
        .def_readonly("source", &SampleSet::source)
        .def_property_readonly("seed",
                               [](const SampleSet& s) {
                                   return s.seed ? py::cast(*s.seed) : py::none().cast<py::object>();
                               })
        .def("mean_square", &SampleSet::mean_square)
        .def("__len__", [](const SampleSet& s) { return s.values.size(); });

    m.def("physical_from_shape", &physical_from_shape, py::arg("params"));
    m.def("shape_from_physical", &shape_from_physical, py::arg("phys"));
    m.def("sample_envelope", &sample_envelope, py::arg("params"), py::arg("n"),
          py::arg("seed"), py::arg("workers") = 0,
          py::call_guard<py::gil_scoped_release>());
    m.def(
        "pdf",
        [](const ParamSet& p, const std::vector<double>& grid, int nodes) {
            return pdf(p, grid, nodes);
        },
        py::arg("params"), py::arg("grid"), py::arg("theta_nodes") = kThetaNodesDefault);
    m.def(
        "cdf",
        [](const ParamSet& p, const std::vector<double>& grid, int nodes) {
            return cdf(p, grid, nodes);
        },
        py::arg("params"), py::arg("grid"), py::arg("theta_nodes") = kThetaNodesDefault);
    m.def(
        "log_pdf",
        [](const ParamSet& p, const std::vector<double>& pts, std::size_t grid, int nodes) {
            return log_pdf(p, pts, grid, nodes);
        },
        py::arg("params"), py::arg("points"), py::arg("grid_size") = 4096,
        py::arg("theta_nodes") = kThetaNodesDefault);

    py::class_<DensityEstimate>(m, "DensityEstimate")
        .def_readonly("grid", &DensityEstimate::grid)
        .def_readonly("density", &DensityEstimate::density)
        .def_readonly("bandwidth", &DensityEstimate::bandwidth)
        .def("trapezoid_integral", &DensityEstimate::trapezoid_integral);

    py::class_<CdfEstimate>(m, "CdfEstimate")
        .def_readonly("sorted_values", &CdfEstimate::sorted_values)
        .def("__call__", &CdfEstimate::operator());

    m.def("normalize", &normalize, py::arg("samples"));
    m.def("kde", &kde, py::arg("samples"), py::arg("grid_size") = 500,
          py::arg("bandwidth_override") = 0.0, py::arg("reflect") = false);
    m.def("ecdf", &ecdf, py::arg("samples"));
    m.def("log_cdf_grid", &log_cdf_grid, py::arg("samples"),
          py::arg("points_per_decade") = 200);

    py::class_<SampleStats>(m, "SampleStats")
        .def_readonly("samples", &SampleStats::samples)
        .def_readonly("dens", &SampleStats::dens)
        .def_readonly("cdf", &SampleStats::cdf)
        .def_readonly("ks_grid", &SampleStats::ks_grid);
    m.def("prepare_stats", &prepare_stats, py::arg("samples"),
          py::arg("kde_grid_size") = 500, py::arg("points_per_decade") = 200,
          py::arg("bandwidth_override") = 0.0);

    py::enum_<Criterion>(m, "Criterion")
        .value("ml", Criterion::ml)
        .value("mse", Criterion::mse)
        .value("rad", Criterion::rad)
        .value("ks", Criterion::ks);

    m.def("llm", &llm, py::arg("samples"), py::arg("params"));
    m.def("mse", &mse, py::arg("dens"), py::arg("params"));
    m.def(
        "kld",
        [](const std::vector<double>& p, const std::vector<double>& q) { return kld(p, q); },
        py::arg("p"), py::arg("q"));
    m.def("rad", &rad, py::arg("dens"), py::arg("params"));
    m.def(
        "ks_log",
        [](const CdfEstimate& c, const ParamSet& p, const std::vector<double>& grid) {
            return ks_log(c, p, grid);
        },
        py::arg("cdf_estimate"), py::arg("params"), py::arg("grid"));
    m.def("evaluate_criterion", &evaluate_criterion, py::arg("criterion"), py::arg("stats"),
          py::arg("params"));

    py::class_<SolutionBox>(m, "SolutionBox")
        .def(py::init<>())
        .def_readwrite("k_range", &SolutionBox::k_range)
        .def_readwrite("delta_range", &SolutionBox::delta_range)
        .def_readwrite("mu_range", &SolutionBox::mu_range);

    py::class_<FitResult>(m, "FitResult")
        .def_readonly("criterion", &FitResult::criterion)
        .def_readonly("lambda_hat", &FitResult::lambda_hat)
        .def_readonly("gof_value", &FitResult::gof_value)
        .def_readonly("starts", &FitResult::starts)
        .def_readonly("converged", &FitResult::converged)
        .def_readonly("evaluations", &FitResult::evaluations)
        .def_readonly("best_start_index", &FitResult::best_start_index);

    m.def("fit", &fit, py::arg("stats"), py::arg("criterion"),
          py::arg("box") = SolutionBox{}, py::arg("n_starts") = 8,
          py::arg("seed") = 0x6d74770ull, py::arg("options") = opt::NmOptions{},
          py::arg("workers") = 0, py::call_guard<py::gil_scoped_release>());

    py::class_<opt::NmOptions>(m, "NmOptions")
        .def(py::init<>())
        .def_readwrite("diameter_tol", &opt::NmOptions::diameter_tol)
        .def_readwrite("fspread_tol", &opt::NmOptions::fspread_tol)
        .def_readwrite("max_iterations", &opt::NmOptions::max_iterations);

    py::class_<PerfConfig>(m, "PerfConfig")
        .def(py::init([](double r_th, std::vector<double> grid) {
                 PerfConfig c;
                 c.r_th = r_th;
                 c.gamma_bar_db = grid.empty() ? PerfConfig::default_grid() : std::move(grid);
                 return c;
             }),
             py::arg("r_th") = 1.0, py::arg("gamma_bar_db") = std::vector<double>{})
        .def_readwrite("r_th", &PerfConfig::r_th)
        .def_readwrite("gamma_bar_db", &PerfConfig::gamma_bar_db)
        .def("gamma_th", &PerfConfig::gamma_th);

    py::class_<PerfCurve>(m, "PerfCurve")
        .def_readonly("gamma_bar_db", &PerfCurve::gamma_bar_db)
        .def_readonly("ec", &PerfCurve::ec)
        .def_readonly("op", &PerfCurve::op)
        .def_readonly("source", &PerfCurve::source);

    m.def("ec_model", &ec_model, py::arg("params"), py::arg("gamma_bar_linear"));
    m.def("ec_empirical", &ec_empirical, py::arg("samples"), py::arg("gamma_bar_linear"));
    m.def("op_model", &op_model, py::arg("params"), py::arg("gamma_bar_linear"),
          py::arg("config"));
    m.def(
        "op_empirical",
        [](const SampleSet& s, double g, const PerfConfig& c) {
            const OpEstimate e = op_empirical(s, g, c);
            return py::make_tuple(e.value, e.low_support);
        },
        py::arg("samples"), py::arg("gamma_bar_linear"), py::arg("config"));
    m.def(
        "sweep_model",
        [](const ParamSet& p, const PerfConfig& c) { return sweep(p, c); },
        py::arg("params"), py::arg("config"), py::call_guard<py::gil_scoped_release>());
    m.def(
        "sweep_empirical",
        [](const SampleSet& s, const PerfConfig& c) { return sweep(s, c); },
        py::arg("samples"), py::arg("config"), py::call_guard<py::gil_scoped_release>());
    m.def("operational_snr", &operational_snr, py::arg("curve"), py::arg("target_op"));
    m.def("db_to_linear", &db_to_linear);
    m.def("linear_to_db", &linear_to_db);

    m.attr("THETA_NODES_DEFAULT") = kThetaNodesDefault;
    m.attr("__version__") = "0.1.0";
}
