#include "doctest.h"

#include <cmath>

#include "natf/cocycle.hpp"
#include "natf/thermo.hpp"
#include "natf/util.hpp"

using namespace natf;

namespace {

CocycleSpec scalar23() {
  return {{Eigen::MatrixXd::Constant(1, 1, 2.0), Eigen::MatrixXd::Constant(1, 1, 3.0)}};
}

double binary_entropy(double p) { return -(p * std::log(p) + (1.0 - p) * std::log(1.0 - p)); }

}  // namespace

TEST_CASE("kingman_functional: additive digit indicator under doubling/Lebesgue") {
  auto sys = DynamicalSystem::doubling();
  // cylinder-measurable observable: the quadrature over representatives is exact
  auto phi = birkhoff_potential(
      [](const Point& p) { return p.coordinate() < 0.5 ? 0.0 : 1.0; }, "digit1");
  auto est = kingman_functional(sys, phi, MeasureModel::lebesgue(), {1, 2, 4},
                                KingmanMode::CylinderExact);
  CHECK(est.value == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(est.direction == BoundDirection::Exact);

  auto zero = kingman_functional(sys, zero_potential(), MeasureModel::lebesgue(), {1, 3},
                                 KingmanMode::CylinderExact);
  CHECK(zero.value == doctest::Approx(0.0));
}

TEST_CASE("kingman_functional: scalar cocycle under Bernoulli(1/2) is constant in n") {
  auto sys = DynamicalSystem::full_shift(2);
  auto phi = cocycle_potential(scalar23(), 1.0);
  auto mu = MeasureModel::bernoulli({0.5, 0.5});
  auto est = kingman_functional(sys, phi, mu, {1, 2, 4, 8}, KingmanMode::CylinderExact);
  double expect = 0.5 * (std::log(2.0) + std::log(3.0));
  CHECK(est.value == doctest::Approx(expect).epsilon(1e-12));
  for (const auto& [n, v] : est.per_n) CHECK(v == doctest::Approx(expect).epsilon(1e-12));
  // sub-additive input: the finite-n inf only bounds F_* from above
  CHECK(est.direction == BoundDirection::UpperBound);
}

TEST_CASE("kingman_functional: monte carlo agrees within error bars") {
  auto sys = DynamicalSystem::doubling();
  auto phi = birkhoff_potential([](const Point& p) { return p.coordinate(); }, "x");
  auto est = kingman_functional(sys, phi, MeasureModel::lebesgue(), {4}, KingmanMode::MonteCarlo,
                                20000, 9);
  REQUIRE(est.std_errors.size() == 1);
  CHECK(est.std_errors[0] > 0.0);
  CHECK(std::abs(est.value - 0.5) <= 5.0 * est.std_errors[0]);
}

TEST_CASE("kingman_functional warns on non-invariant measures") {
  auto sys = DynamicalSystem::full_shift(2);
  auto phi = cocycle_potential(scalar23(), 1.0);
  auto est = kingman_functional(sys, phi, MeasureModel::bernoulli({0.5, 0.5}), {1, 2},
                                KingmanMode::CylinderExact);
  CHECK(!est.invariance_warning);
}

TEST_CASE("cylinder_pressure: closed forms on the full 2-shift") {
  auto sys = DynamicalSystem::full_shift(2);
  auto p0 = cylinder_pressure(sys, zero_potential(), 10);
  for (const auto& [n, v] : p0.per_n) CHECK(v == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  auto pc = cylinder_pressure(sys, constant_potential(-std::log(2.0)), 10);
  for (const auto& [n, v] : pc.per_n) CHECK(v == doctest::Approx(0.0).epsilon(1e-12));

  auto phi = cocycle_potential(scalar23(), 1.0);
  auto p1 = cylinder_pressure(sys, phi, 12);
  CHECK(p1.value == doctest::Approx(std::log(5.0)).epsilon(1e-12));
}

TEST_CASE("property: cylinder_pressure matches cocycle_pressure to 1e-10") {
  auto sys = DynamicalSystem::full_shift(2);
  for (double q : {0.5, 1.0, 2.0}) {
    auto phi = cocycle_potential(scalar23(), q);
    auto via_thermo = cylinder_pressure(sys, phi, 10);
    auto via_cocycle = cocycle_pressure(scalar23(), q, 10);
    REQUIRE(via_thermo.per_n.size() == via_cocycle.size());
    for (std::size_t i = 0; i < via_cocycle.size(); ++i)
      CHECK(via_thermo.per_n[i].second ==
            doctest::Approx(via_cocycle[i].value).epsilon(1e-10));
  }
}

TEST_CASE("cylinder_pressure budget error") {
  auto sys = DynamicalSystem::full_shift(2);
  CHECK_THROWS_AS(cylinder_pressure(sys, zero_potential(), 40, 1 << 8), BudgetError);
}

TEST_CASE("separated_pressure: doubling with zero potential near log 2") {
  auto sys = DynamicalSystem::doubling();
  // grid matched to the dyadic cylinder structure: all 2^10 grid points are
  // pairwise (10, 2^-6)-separated, giving (1/10) log 2^10 = log 2 exactly
  auto est = separated_pressure(sys, zero_potential(), 10, std::pow(2.0, -6),
                                std::pow(2.0, -10));
  CHECK(std::abs(est.value - std::log(2.0)) <= 0.05 * std::log(2.0));
  CHECK(est.method == "separated");
}

TEST_CASE("separated_pressure: beta=3 entropy near log 3") {
  auto sys = DynamicalSystem::beta_map(3.0);
  auto est = separated_pressure(sys, zero_potential(), 8, 1.0 / 16.0, std::pow(3.0, -8));
  CHECK(std::abs(est.value - std::log(3.0)) <= 0.05 * std::log(3.0));
}

TEST_CASE("separated_pressure: conformal potential of doubling has zero pressure") {
  auto sys = DynamicalSystem::doubling();
  // S_n(-log|T'|) = -n log 2
  auto est = separated_pressure(sys, constant_potential(-std::log(2.0)), 10, std::pow(2.0, -6),
                                std::pow(2.0, -10));
  CHECK(std::abs(est.value) <= 0.05);
}

TEST_CASE("separated_pressure records refinement drift") {
  auto sys = DynamicalSystem::doubling();
  auto est = separated_pressure(sys, zero_potential(), 10, std::pow(2.0, -6),
                                std::pow(2.0, -10));
  // the refinement doubles the grid and admits more separated points; the
  // drift is recorded and the run flagged rather than silently accepted
  CHECK(est.refined_value >= est.value - 1e-12);
  CHECK(est.drift >= 0.0);
  CHECK(est.unconverged == (est.drift > 0.05));
}

TEST_CASE("variational_gap: zero potential peaks at the uniform measure") {
  auto sys = DynamicalSystem::full_shift(2);
  auto rep = variational_gap(sys, zero_potential(), bernoulli_family(2), std::log(2.0), {1, 2});
  CHECK(std::abs(rep.gap) <= 1e-6);
  CHECK(rep.argmax[0] == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(rep.satisfied);
}

TEST_CASE("variational_gap: scalar cocycle optimum at p = 2/5") {
  auto sys = DynamicalSystem::full_shift(2);
  auto phi = cocycle_potential(scalar23(), 1.0);
  auto rep = variational_gap(sys, phi, bernoulli_family(2), std::log(5.0), {1, 2, 4});
  CHECK(rep.gap <= 1e-4);
  CHECK(rep.gap >= -1e-6);
  CHECK(std::abs(rep.argmax[0] - 0.4) <= 1e-3);
  CHECK(rep.best_value == doctest::Approx(std::log(5.0)).epsilon(1e-6));
}

TEST_CASE("variational_gap: restricted family leaves a positive gap") {
  auto sys = DynamicalSystem::full_shift(2);
  auto fam = restricted_bernoulli_family(
      2, [](const std::vector<double>& p) { return p[0] <= 0.1; }, "bernoulli_p_le_0.1");
  auto rep = variational_gap(sys, zero_potential(), fam, std::log(2.0), {1, 2});
  double expect = std::log(2.0) - binary_entropy(0.1);
  CHECK(rep.gap == doctest::Approx(expect).epsilon(1e-3));
  CHECK(rep.gap > 0.0);
}

TEST_CASE("weak_gibbs_check: Bernoulli(1/2) against -n log 2 is exactly Gibbs") {
  auto sys = DynamicalSystem::full_shift(2);
  auto rep = weak_gibbs_check(sys, constant_potential(-std::log(2.0)),
                              MeasureModel::bernoulli({0.5, 0.5}), 0.0, 40,
                              {5, 10, 15, 20}, 0.25, 11, 1.5);
  CHECK(rep.verdict == GibbsReport::Verdict::Gibbs);
  CHECK(rep.sup_K == doctest::Approx(1.0).epsilon(1e-9));
  for (const auto& row : rep.rows) CHECK(row.K_n == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rep.satisfies_weak_gibbs());  // class inclusion
}

TEST_CASE("weak_gibbs_check: golden-mean Parry measure is weak Gibbs") {
  double beta = 0.5 * (1.0 + std::sqrt(5.0));
  auto sys = DynamicalSystem::beta_map(beta);
  auto nu = MeasureModel::parry_beta(beta);
  auto rep = weak_gibbs_check(sys, constant_potential(-std::log(beta)), nu, 0.0, 40,
                              {5, 10, 15, 20, 25}, 0.25, 13, 1.0);
  CHECK(rep.satisfies_weak_gibbs());
  CHECK(std::abs(rep.slope) <= 0.02);
  // K_n stays bounded by the Parry density ratio envelope
  double density_ratio = beta;  // max/min of the two-piece density is beta
  for (const auto& row : rep.rows) CHECK(row.K_n <= density_ratio * (1.0 + 1e-6) + 1.0);
}

TEST_CASE("weak_gibbs_check: super-exponential constants are flagged as violated") {
  auto sys = DynamicalSystem::full_shift(2);
  // drift 0.1 n^2 makes K_n = e^{0.1 n^2}: (1/n) log K_n climbs with slope 0.1
  auto phi = perturbed_potential(constant_potential(-std::log(2.0)),
                                 [](int n) { return 0.1 * double(n) * double(n); }, "blowup");
  phi.bowen_bound = nullptr;  // treat the drift as part of the potential proper
  auto rep = weak_gibbs_check(sys, phi, MeasureModel::bernoulli({0.5, 0.5}), 0.0, 20,
                              {5, 10, 15, 20}, 0.25, 11, 1.5);
  CHECK(rep.verdict == GibbsReport::Verdict::Violated);
  CHECK(!rep.satisfies_weak_gibbs());
}

TEST_CASE("property: kingman per-n averages nonincreasing along doubling n for sub-additive input") {
  Eigen::MatrixXd a(2, 2), b(2, 2);
  a << 1, 1, 1, 0;
  b << 2, 1, 0, 1;
  CocycleSpec c{{a, b}};
  auto sys = DynamicalSystem::full_shift(2);
  auto phi = cocycle_potential(c, 1.0);
  for (auto mu : {MeasureModel::bernoulli({0.5, 0.5}), MeasureModel::bernoulli({0.2, 0.8})}) {
    auto est = kingman_functional(sys, phi, mu, {1, 2, 4, 8}, KingmanMode::CylinderExact);
    for (std::size_t i = 1; i < est.per_n.size(); ++i)
      CHECK(est.per_n[i].second <= est.per_n[i - 1].second + 1e-12);
  }
}

TEST_CASE("maximize_over_family honors constraints") {
  auto fam = bernoulli_family(2);
  // maximize entropy subject to p_0 >= 0.7
  auto opt = maximize_over_family(
      fam,
      [](const MeasureModel& mu, const std::vector<double>&) { return *mu.entropy(); },
      [](const MeasureModel&, const std::vector<double>& p) { return p[0] - 0.7; });
  CHECK(opt.feasible_found);
  CHECK(opt.argmax[0] == doctest::Approx(0.7).epsilon(1e-3));
  CHECK(opt.value == doctest::Approx(binary_entropy(0.7)).epsilon(1e-4));
}
