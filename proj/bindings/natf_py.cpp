#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <Eigen/Dense>

#include "natf/cocycle.hpp"
#include "natf/deviation.hpp"
#include "natf/measure.hpp"
#include "natf/mistake.hpp"
#include "natf/potential.hpp"
#include "natf/system.hpp"
#include "natf/thermo.hpp"
#include "natf/verify.hpp"

namespace py = pybind11;
using namespace natf;

namespace {

CocycleSpec cocycle_from_lists(const std::vector<std::vector<std::vector<double>>>& mats) {
  CocycleSpec c;
  for (const auto& m : mats) {
    int rows = int(m.size());
    int cols = rows > 0 ? int(m[0].size()) : 0;
    Eigen::MatrixXd em(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) em(i, j) = m[std::size_t(i)][std::size_t(j)];
    c.matrices.push_back(em);
  }
  c.validate();
  return c;
}

py::dict pressure_dict(const PressureEstimate& est) {
  py::dict d;
  d["method"] = est.method;
  d["value"] = est.value;
  d["monotone"] = est.monotone;
  d["unconverged"] = est.unconverged;
  d["drift"] = est.drift;
  py::list per_n;
  for (auto& [n, v] : est.per_n) per_n.append(py::make_tuple(n, v));
  d["per_n"] = per_n;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "non-additive thermodynamic formalism: pressure, entropy, Gibbs and "
            "large-deviation estimators";

  py::class_<Point>(m, "Point")
      .def_static("interval", &Point::interval)
      .def_static("shift", &Point::shift, py::arg("word"), py::arg("tail_period") = 0)
      .def("symbol", &Point::symbol)
      .def_property_readonly("coordinate", &Point::coordinate);

  py::class_<DynamicalSystem>(m, "DynamicalSystem")
      .def_static("doubling", &DynamicalSystem::doubling)
      .def_static("beta_map", &DynamicalSystem::beta_map)
      .def_static("manneville_pomeau", &DynamicalSystem::manneville_pomeau)
      .def_static("full_shift", &DynamicalSystem::full_shift)
      .def_static("sft", &DynamicalSystem::sft)
      .def_property_readonly("name", &DynamicalSystem::name)
      .def("branch_count", &DynamicalSystem::branch_count)
      .def("apply", &DynamicalSystem::apply)
      .def("metric", &DynamicalSystem::metric);

  m.def("bowen_distance", &bowen_distance);
  m.def("symbolic_word", &symbolic_word);

  py::class_<MeasureModel>(m, "MeasureModel")
      .def_static("bernoulli", &MeasureModel::bernoulli)
      .def_static("markov", &MeasureModel::markov, py::arg("rows"),
                  py::arg("stationary") = std::nullopt)
      .def_static("lebesgue", &MeasureModel::lebesgue)
      .def_static("parry_beta", &MeasureModel::parry_beta)
      .def_static("gibbs_cylinder", &MeasureModel::gibbs_cylinder, py::arg("phi"),
                  py::arg("n_max"), py::arg("grid_size") = 1 << 13)
      .def_property_readonly("entropy", &MeasureModel::entropy)
      .def("log_cylinder_mass",
           [](const MeasureModel& mm, const DynamicalSystem& sys, const std::vector<int>& w) {
             return mm.log_cylinder_mass(sys, w);
           })
      .def("log_mistake_mass",
           [](const MeasureModel& mm, const DynamicalSystem& sys, const std::vector<int>& w,
              long long g) { return mm.log_mistake_mass(sys, w, g); })
      .def("gibbs_pressure", &MeasureModel::gibbs_pressure)
      .def("parry_density", &MeasureModel::parry_density);

  py::class_<PotentialSequence>(m, "PotentialSequence")
      .def("__call__", &PotentialSequence::operator())
      .def_readonly("name", &PotentialSequence::name);
  m.def("zero_potential", &zero_potential);
  m.def("constant_potential", &constant_potential);
  m.def("digit_frequency_potential", &digit_frequency_potential);
  m.def("birkhoff_potential", &birkhoff_potential);

  py::class_<CocycleSpec>(m, "CocycleSpec");
  m.def("cocycle", &cocycle_from_lists, "Build a cocycle from a list of row-major matrices");
  m.def("cocycle_potential", &cocycle_potential);
  m.def(
      "cocycle_pressure",
      [](const CocycleSpec& c, double q, int n_max) {
        py::list out;
        for (const auto& pt : cocycle_pressure(c, q, n_max)) {
          py::dict d;
          d["q"] = pt.q;
          d["n"] = pt.n;
          d["value"] = pt.value;
          if (pt.extrapolated) d["extrapolated"] = *pt.extrapolated;
          out.append(d);
        }
        return out;
      },
      py::arg("cocycle"), py::arg("q"), py::arg("n_max"));
  m.def(
      "lyapunov_exact",
      [](const CocycleSpec& c, const MeasureModel& mu, int n) {
        auto est = lyapunov_cylinder_exact(c, mu, n);
        return py::make_tuple(est.value, est.std_error);
      },
      py::arg("cocycle"), py::arg("mu"), py::arg("n"));
  m.def(
      "lyapunov_monte_carlo",
      [](const CocycleSpec& c, const MeasureModel& mu, long long samples, int n,
         std::uint64_t seed) {
        auto est = lyapunov_monte_carlo(c, mu, samples, n, seed);
        return py::make_tuple(est.value, est.std_error);
      },
      py::arg("cocycle"), py::arg("mu"), py::arg("samples"), py::arg("n"), py::arg("seed"));

  py::class_<MistakeFunction>(m, "MistakeFunction")
      .def("__call__", &MistakeFunction::operator());
  m.def("zero_mistakes", &zero_mistakes);
  m.def("constant_mistakes", &constant_mistakes);
  m.def("sqrt_mistakes", &sqrt_mistakes, py::arg("scale") = 1.0);
  m.def("mistake_ball_cylinder_count", &mistake_ball_cylinder_count);
  m.def("log_mistake_ball_cylinder_count", &log_mistake_ball_cylinder_count);

  m.def(
      "kingman",
      [](const DynamicalSystem& sys, const PotentialSequence& phi, const MeasureModel& mu,
         const std::vector<int>& n_list) {
        auto est = kingman_functional(sys, phi, mu, n_list, KingmanMode::CylinderExact);
        py::dict d;
        d["value"] = est.value;
        d["argmin_n"] = est.argmin_n;
        d["direction"] = est.direction == BoundDirection::Exact       ? "exact"
                         : est.direction == BoundDirection::UpperBound ? "upper_bound"
                                                                       : "two_sided";
        return d;
      },
      py::arg("sys"), py::arg("phi"), py::arg("mu"), py::arg("n_list"));

  m.def(
      "cylinder_pressure",
      [](const DynamicalSystem& sys, const PotentialSequence& phi, int n_max) {
        return pressure_dict(cylinder_pressure(sys, phi, n_max));
      },
      py::arg("sys"), py::arg("phi"), py::arg("n_max"));
  m.def(
      "separated_pressure",
      [](const DynamicalSystem& sys, const PotentialSequence& phi, int n, double eps,
         double grid) { return pressure_dict(separated_pressure(sys, phi, n, eps, grid)); },
      py::arg("sys"), py::arg("phi"), py::arg("n"), py::arg("eps"), py::arg("grid_resolution"));

  m.def(
      "variational_gap",
      [](const DynamicalSystem& sys, const PotentialSequence& phi, int symbols, double pressure,
         const std::vector<int>& n_list) {
        auto rep = variational_gap(sys, phi, bernoulli_family(symbols), pressure, n_list);
        py::dict d;
        d["gap"] = rep.gap;
        d["best_value"] = rep.best_value;
        d["argmax"] = rep.argmax;
        d["satisfied"] = rep.satisfied;
        return d;
      },
      py::arg("sys"), py::arg("phi"), py::arg("symbols"), py::arg("pressure"), py::arg("n_list"));

  m.def(
      "weak_gibbs_check",
      [](const DynamicalSystem& sys, const PotentialSequence& phi, const MeasureModel& nu,
         double pressure, int samples, const std::vector<int>& n_list, double eps,
         std::uint64_t seed, double threshold) {
        auto rep = weak_gibbs_check(sys, phi, nu, pressure, samples, n_list, eps, seed, threshold);
        py::dict d;
        d["verdict"] = rep.verdict == GibbsReport::Verdict::Gibbs       ? "gibbs"
                       : rep.verdict == GibbsReport::Verdict::WeakGibbs ? "weak_gibbs"
                                                                        : "violated";
        d["sup_K"] = rep.sup_K;
        d["slope"] = rep.slope;
        return d;
      },
      py::arg("sys"), py::arg("phi"), py::arg("nu"), py::arg("pressure"), py::arg("samples"),
      py::arg("n_list"), py::arg("eps"), py::arg("seed"), py::arg("gibbs_threshold") = 100.0);

  m.def(
      "binomial_deviation_measure",
      [](double threshold, int n) {
        DeviationQuery q;
        q.sys = DynamicalSystem::doubling();
        q.observable = digit_frequency_potential(1);
        q.iid_values = std::vector<double>{0.0, 1.0};
        q.reference = MeasureModel::lebesgue();
        q.threshold = threshold;
        q.schedule = {n};
        auto pt = deviation_measure(q, n, DeviationEngine::ExactCombinatorial);
        return pt.measure;
      },
      py::arg("threshold"), py::arg("n"),
      "Exact Lebesgue measure of the doubling-map digit deviation set at depth n");

  m.def("verification_suite", [](std::uint64_t seed) {
    py::list out;
    for (const auto& r : verification_suite(seed)) {
      py::dict d;
      d["name"] = r.name;
      d["passed"] = r.passed;
      d["detail"] = r.detail;
      out.append(d);
    }
    return out;
  }, py::arg("seed") = 1);
}
