#include "sojourn/config.hpp"
#include "sojourn/covariance_models.hpp"
#include "sojourn/errors.hpp"
#include "sojourn/field_sampler.hpp"
#include "sojourn/hermite_chaos.hpp"
#include "sojourn/stein_bounds.hpp"
#include "sojourn/study_harness.hpp"
#include "sojourn/variance_theory.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <string>
#include <vector>

namespace py = pybind11;
using namespace sojourn;

namespace {

py::array_t<double> field_array(const FieldSample& s) {
  std::vector<py::ssize_t> shape(static_cast<std::size_t>(s.grid.d), static_cast<py::ssize_t>(s.grid.n));
  py::array_t<double> out(shape);
  std::copy(s.values.begin(), s.values.end(), out.mutable_data());
  return out;
}

py::dict bound_dict(const RateBound& b) {
  py::dict out;
  out["T"] = b.T;
  out["u"] = b.u;
  out["mode"] = to_string(b.mode);
  out["n_trunc"] = b.n_trunc;
  out["d1"] = b.d1;
  out["d2"] = b.d2;
  out["d3"] = b.d3;
  out["term_body"] = b.term_body;
  out["term_body_d1_form"] = b.term_body_d1_form;
  out["term_tail"] = b.term_tail;
  out["total"] = b.total;
  out["tail_non_vanishing"] = b.tail_non_vanishing;
  py::dict constants;
  for (const auto& c : b.constants_profile) constants[py::str(c.name)] = py::make_tuple(c.value, c.provenance);
  out["constants"] = constants;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Sojourn-time CLT numerics";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());
  py::register_exception<CrossValidationError>(m, "CrossValidationError", base.ptr());
  py::register_exception<DivergenceError>(m, "DivergenceError", base.ptr());
  py::register_exception<NotPsdError>(m, "NotPsdError", base.ptr());
  py::register_exception<GridMismatchError>(m, "GridMismatchError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());

  py::class_<CovarianceModel>(m, "CovarianceModel")
      .def_static("powered_exponential", &CovarianceModel::powered_exponential, py::arg("alpha"),
                  py::arg("scale") = 1.0, py::arg("d") = 1)
      .def_static("cauchy", &CovarianceModel::cauchy, py::arg("beta"), py::arg("scale") = 1.0,
                  py::arg("d") = 1)
      .def_property_readonly("kind", [](const CovarianceModel& c) { return to_string(c.kind); })
      .def_readonly("alpha", &CovarianceModel::alpha)
      .def_readonly("beta", &CovarianceModel::beta)
      .def_readonly("scale", &CovarianceModel::scale)
      .def_readonly("d", &CovarianceModel::d)
      .def("rho", [](const CovarianceModel& c, double r) { return rho_radial(c, r); })
      .def("l1_norm", [](const CovarianceModel& c) { return l1_norm(c); })
      .def("__repr__", &CovarianceModel::describe);

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init([](int d, double T, double h) { return GridSpec::make(d, T, h); }), py::arg("d"),
           py::arg("T"), py::arg("h"))
      .def_readonly("d", &GridSpec::d)
      .def_readonly("h", &GridSpec::h)
      .def_readonly("n", &GridSpec::n)
      .def_property_readonly("T_grid", &GridSpec::T_grid);

  m.def("hermite", &hermite, py::arg("n"), py::arg("x"));
  m.def("hermite_scaled", &hermite_scaled, py::arg("n"), py::arg("x"));
  m.def("chaos_covariance_series", &chaos_covariance_series, py::arg("u"), py::arg("rho"),
        py::arg("tol") = 1e-14, py::arg("max_order") = 1 << 22);
  m.def("indicator_variance_series", &indicator_variance_series, py::arg("u"), py::arg("tol") = 1e-8,
        py::arg("max_order") = 1 << 22);
  m.def("chaos_variance_inequality", [](int p) {
    const InequalityCertificate c = chaos_variance_inequality(p);
    return py::make_tuple(c.lhs.str(), c.rhs.str(), c.holds);
  }, py::arg("p"));

  m.def("covariance_of_indicators", &covariance_of_indicators, py::arg("u"), py::arg("rho"),
        py::arg("rel_tol") = 1e-12);
  m.def("sigma_squared", &sigma_squared, py::arg("model"), py::arg("u"), py::arg("tol") = 1e-8);
  m.def("var_sojourn_exact", &var_sojourn_exact, py::arg("model"), py::arg("T"), py::arg("u"),
        py::arg("rel_tol") = 1e-8);
  m.def("berman_constant", &berman_constant, py::arg("model"));
  m.def("berman_B_asymptotic", &berman_B_asymptotic, py::arg("model"), py::arg("u"));

  m.def("fixed_level_bound", [](const CovarianceModel& c, double u, double T) {
    return bound_dict(fixed_level_bound(c, u, T));
  }, py::arg("model"), py::arg("u"), py::arg("T"));
  m.def("moving_level_bound", [](const CovarianceModel& c, double u, double T, double beta) {
    return bound_dict(moving_level_bound(c, u, T, beta));
  }, py::arg("model"), py::arg("u"), py::arg("T"), py::arg("beta") = 0.25);
  m.def("corollary_condition", &corollary_condition, py::arg("gamma"), py::arg("alpha"));

  m.def("sample_field", [](const CovarianceModel& c, const GridSpec& g, std::uint64_t seed, std::uint64_t r) {
    return field_array(sample_field(c, g, seed, r));
  }, py::arg("model"), py::arg("grid"), py::arg("seed"), py::arg("replicate") = 0);
  m.def("sojourn_time", [](py::array_t<double, py::array::c_style | py::array::forcecast> values,
                           const GridSpec& g, double u) {
    return sojourn_time(std::span<const double>(values.data(), static_cast<std::size_t>(values.size())), g, u);
  }, py::arg("values"), py::arg("grid"), py::arg("u"));
  m.def("wasserstein1_to_gaussian", [](py::array_t<double, py::array::c_style | py::array::forcecast> xs,
                                       double sigma) {
    return wasserstein1_to_gaussian(std::span<const double>(xs.data(), static_cast<std::size_t>(xs.size())), sigma);
  }, py::arg("samples"), py::arg("sigma"));

  m.def("run_study_csv", [](const std::string& json_text) {
    const ConfigFile cfg = parse_config(json_text);
    ConvergenceReport report;
    {
      py::gil_scoped_release release;
      report = run_study(cfg.experiment);
    }
    return report_to_csv(report);
  }, py::arg("config_json"), "Run the study described by a JSON config and return the CSV report.");
}
