#include "copulakde/model.hpp"
#include "copulakde/model_io.hpp"
#include "copulakde/parametric.hpp"
#include "copulakde/stats.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace ckde;

namespace {

FittedCopula
fit_wrapper(const Eigen::MatrixX2d& data, const std::string& method,
            Eigen::Index knots, double mult, int renorm_iters,
            Eigen::Index min_n)
{
  FitOptions opts;
  opts.knots = knots;
  opts.mult = mult;
  opts.renorm_iters = renorm_iters;
  opts.min_n = min_n;
  PseudoSample sample(data, min_n);
  return FittedCopula::fit(sample, method_from_string(method), opts);
}

py::dict
measures_dict(const FittedCopula& model, Eigen::Index n_qmc,
              std::uint64_t seed)
{
  DependenceReport report = model.dep_measures(n_qmc, seed);
  py::dict out;
  out["kendall"] = report.kendall;
  out["spearman"] = report.spearman;
  out["blomqvist"] = report.blomqvist;
  out["gini"] = report.gini;
  out["vd_waerden"] = report.vd_waerden;
  out["minfo"] = report.minfo;
  out["linfoot"] = report.linfoot;
  out["samples_used"] = report.samples_used;
  return out;
}

bench::ParametricCopula
make_copula(const std::string& family, double tau)
{
  bench::Family fam = bench::family_from_string(family);
  if (fam == bench::Family::independence)
    return bench::ParametricCopula(fam, 0.0);
  return bench::ParametricCopula::from_tau(fam, tau);
}

} // namespace

PYBIND11_MODULE(copulakde, m)
{
  m.doc() = "kernel copula density estimation";

  py::class_<FittedCopula>(m, "Model")
    .def_property_readonly("method",
                           [](const FittedCopula& self) {
                             return method_to_string(self.method());
                           })
    .def_property_readonly("nobs", &FittedCopula::nobs)
    .def_property_readonly("loglik", &FittedCopula::loglik)
    .def_property_readonly("edf", &FittedCopula::edf)
    .def_property_readonly("aic",
                           [](const FittedCopula& self) {
                             return self.stats().aic;
                           })
    .def_property_readonly("caic",
                           [](const FittedCopula& self) {
                             return self.stats().caic;
                           })
    .def_property_readonly("bic",
                           [](const FittedCopula& self) {
                             return self.stats().bic;
                           })
    .def_property_readonly("renorm_iters", &FittedCopula::renorm_iters)
    .def("pdf",
         py::overload_cast<const Eigen::MatrixX2d&>(&FittedCopula::pdf,
                                                    py::const_),
         py::arg("points"), "copula density at an (n, 2) array of points")
    .def("cdf",
         py::overload_cast<const Eigen::MatrixX2d&>(&FittedCopula::cdf,
                                                    py::const_),
         py::arg("points"))
    .def("hfunc", &FittedCopula::hfunc, py::arg("v"), py::arg("given_u"),
         "conditional cdf C(v | u)")
    .def("hfunc_inverse", &FittedCopula::hfunc_inverse, py::arg("w"),
         py::arg("given_u"))
    .def("simulate", &FittedCopula::simulate, py::arg("n"),
         py::arg("quasi") = false, py::arg("seed") = 1,
         "draws from the fitted density; quasi uses the low-discrepancy "
         "stream")
    .def("dep_measures", &measures_dict, py::arg("n_qmc") = 10000,
         py::arg("seed") = 1)
    .def("save",
         [](const FittedCopula& self, const std::string& path) {
           io::save_model(self, path);
         },
         py::arg("path"))
    .def("__repr__", [](const FittedCopula& self) {
      return "<copulakde.Model method='" + method_to_string(self.method()) +
             "' nobs=" + std::to_string(self.nobs()) + ">";
    });

  m.def("fit", &fit_wrapper, py::arg("data"), py::arg("method") = "tll2nn",
        py::arg("knots") = 30, py::arg("mult") = 1.0,
        py::arg("renorm_iters") = 3, py::arg("min_n") = 10,
        "fit a copula density to an (n, 2) array of pseudo-observations");
  m.def("load", &io::load_model, py::arg("path"),
        "load a model file written by save() or the command line tool");
  m.def("ranks_to_pseudo", &stats::ranks_to_pseudo, py::arg("data"),
        "column-wise average ranks divided by n + 1");

  py::class_<bench::ParametricCopula>(m, "ParametricCopula")
    .def(py::init(&make_copula), py::arg("family"), py::arg("tau") = 0.0)
    .def("pdf", &bench::ParametricCopula::pdf, py::arg("u"), py::arg("v"))
    .def("cdf", &bench::ParametricCopula::cdf, py::arg("u"), py::arg("v"))
    .def("sample", &bench::ParametricCopula::sample, py::arg("n"),
         py::arg("seed") = 1);
}
