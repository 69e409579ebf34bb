#include "doctest.h"

#include <cmath>

#include "natf/cocycle.hpp"
#include "natf/measure.hpp"
#include "natf/util.hpp"

using namespace natf;

namespace {

CocycleSpec scalar23() {
  return {{Eigen::MatrixXd::Constant(1, 1, 2.0), Eigen::MatrixXd::Constant(1, 1, 3.0)}};
}

CocycleSpec diag_pair() {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2), b = Eigen::MatrixXd::Zero(2, 2);
  a(0, 0) = 2.0;
  a(1, 1) = 0.5;
  b(0, 0) = 3.0;
  b(1, 1) = 1.0 / 3.0;
  return {{a, b}};
}

}  // namespace

TEST_CASE("word_product: order is right-to-left") {
  auto c = scalar23();
  std::vector<int> w{0, 1};
  CHECK(word_product(c, w)(0, 0) == doctest::Approx(6.0));
  std::vector<int> single{1};
  CHECK(word_product(c, single)(0, 0) == doctest::Approx(3.0));

  auto d = diag_pair();
  std::vector<int> w2{0, 0, 1};
  auto m = word_product(d, w2);
  CHECK(m(0, 0) == doctest::Approx(12.0));
  CHECK(m(1, 1) == doctest::Approx(1.0 / 12.0));
  CHECK(m(0, 1) == doctest::Approx(0.0));

  // non-commuting pair distinguishes the two orders
  Eigen::MatrixXd p(2, 2), q(2, 2);
  p << 1, 1, 0, 1;
  q << 1, 0, 1, 1;
  CocycleSpec nc{{p, q}};
  std::vector<int> w3{0, 1};
  CHECK((word_product(nc, w3) - q * p).norm() == doctest::Approx(0.0));

  std::vector<int> bad{0, 2};
  CHECK_THROWS_AS(word_product(c, bad), std::invalid_argument);
}

TEST_CASE("singular values: diagonal, triangular, identity") {
  Eigen::MatrixXd diag(2, 2);
  diag << 2, 0, 0, 3;
  auto s = singular_values(diag);
  REQUIRE(s.size() == 2);
  CHECK(s[0] == doctest::Approx(3.0));
  CHECK(s[1] == doctest::Approx(2.0));
  CHECK(operator_norm(diag) == doctest::Approx(3.0));

  Eigen::MatrixXd tri(2, 2);
  tri << 2, 1, 0, 3;
  auto st = singular_values(tri);
  // eigenvalues of A^T A are 7 +- sqrt(13)
  CHECK(st[0] == doctest::Approx(std::sqrt(7.0 + std::sqrt(13.0))).epsilon(1e-10));
  CHECK(st[1] == doctest::Approx(std::sqrt(7.0 - std::sqrt(13.0))).epsilon(1e-10));
  CHECK(st[0] * st[1] == doctest::Approx(6.0).epsilon(1e-9));

  auto si = singular_values(Eigen::MatrixXd::Identity(3, 3));
  for (double v : si) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("log_word_norm stays finite via renormalization for long words") {
  auto c = scalar23();
  std::vector<int> w(200, 1);
  CHECK(log_word_norm(c, w) == doctest::Approx(200.0 * std::log(3.0)).epsilon(1e-10));
}

TEST_CASE("cocycle_potential: q=0 vanishes, scalar values, zero products tagged") {
  auto c = scalar23();
  auto sys = DynamicalSystem::full_shift(2);
  Point x = Point::shift({0, 1}, 2);
  CHECK(cocycle_potential(c, 0.0)(sys, x, 3) == doctest::Approx(0.0));
  CHECK(cocycle_potential(c, 2.0)(sys, x, 2) == doctest::Approx(2.0 * std::log(6.0)));
  CHECK(cocycle_potential(c, 1.0).declared_class == PotentialClass::SubAdditive);

  // nilpotent product: value is -inf, not a crash
  Eigen::MatrixXd nil(2, 2);
  nil << 0, 1, 0, 0;
  CocycleSpec z{{nil, nil}};
  Point y = Point::shift({0, 0}, 1);
  CHECK(cocycle_potential(z, 1.0)(sys, y, 2) == kNegInf);
}

TEST_CASE("singular_value_potential: sigma_2 companion on the diagonal pair") {
  auto d = diag_pair();
  auto sys = DynamicalSystem::full_shift(2);
  Point x = Point::shift({0, 1}, 2);
  auto phi2 = singular_value_potential(d, 2, 1.0);
  // M_(0,1) = diag(6, 1/6): sigma_2 = 1/6
  CHECK(phi2(sys, x, 2) == doctest::Approx(-std::log(6.0)).epsilon(1e-10));
  auto phi1 = singular_value_potential(d, 1, 1.0);
  CHECK(phi1(sys, x, 2) == doctest::Approx(std::log(6.0)).epsilon(1e-10));
}

TEST_CASE("cocycle_pressure: scalar closed forms") {
  auto c = scalar23();
  for (double q : {0.0, 1.0, 2.0}) {
    double expect = std::log(std::pow(2.0, q) + std::pow(3.0, q));
    for (const auto& pt : cocycle_pressure(c, q, 14)) {
      CHECK(pt.value == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("cocycle_pressure: q=0 counts words for matrix input too") {
  auto d = diag_pair();
  for (const auto& pt : cocycle_pressure(d, 0.0, 10))
    CHECK(pt.value == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("cocycle_pressure: enumeration budget is enforced") {
  auto d = diag_pair();
  CHECK_THROWS_AS(cocycle_pressure(d, 1.0, 30, 1 << 10), BudgetError);
  try {
    cocycle_pressure(d, 1.0, 30, 1 << 10);
  } catch (const BudgetError& e) {
    CHECK(e.limit == (1 << 10));
  }
}

TEST_CASE("lyapunov: diagonal pair under Bernoulli(1/2) gives log sqrt(6)") {
  auto d = diag_pair();
  auto mu = MeasureModel::bernoulli({0.5, 0.5});
  double expect = 0.5 * (std::log(2.0) + std::log(3.0));
  for (int n : {1, 4, 10}) {
    auto est = lyapunov_cylinder_exact(d, mu, n);
    CHECK(est.value == doctest::Approx(expect).epsilon(1e-12));
    CHECK(est.std_error == 0.0);
  }
  auto mc = lyapunov_monte_carlo(d, mu, 20000, 64, 5);
  CHECK(std::abs(mc.value - expect) <= 4.0 * mc.std_error + 1e-6);
}

TEST_CASE("lyapunov: single matrix and Bernoulli scalar closed forms") {
  CocycleSpec one{{Eigen::MatrixXd::Constant(1, 1, 2.0)}};
  auto mu1 = MeasureModel::bernoulli({1.0});
  CHECK(lyapunov_cylinder_exact(one, mu1, 6).value == doctest::Approx(std::log(2.0)));

  auto c = scalar23();
  for (double p : {0.2, 0.5, 0.9}) {
    auto mu = MeasureModel::bernoulli({p, 1.0 - p});
    double expect = p * std::log(2.0) + (1.0 - p) * std::log(3.0);
    // additive scalar case: constant in n
    for (int n : {1, 3, 8})
      CHECK(lyapunov_cylinder_exact(c, mu, n).value == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("irreducible: diagonal pair, rotation pair, scalars") {
  Eigen::MatrixXd d1 = Eigen::MatrixXd::Zero(2, 2), d2 = Eigen::MatrixXd::Zero(2, 2);
  d1(0, 0) = 2.0;
  d1(1, 1) = 1.0;
  d2(0, 0) = 1.0;
  d2(1, 1) = 3.0;
  auto r1 = irreducible({{d1, d2}});
  CHECK(r1.verdict == IrreducibilityVerdict::CommonInvariantSubspace);
  CHECK(r1.basis.cols() >= 1);

  double a = M_PI / 4.0;
  Eigen::MatrixXd rot(2, 2);
  rot << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  auto r2 = irreducible({{rot, d1}});
  CHECK(r2.verdict == IrreducibilityVerdict::Irreducible);

  auto r3 = irreducible(scalar23());
  CHECK(r3.verdict == IrreducibilityVerdict::Irreducible);
}

TEST_CASE("property: norm sub-additivity over all enumerated word pairs") {
  for (const auto& c : {scalar23(), diag_pair()}) {
    for (int total = 2; total <= 8; ++total) {
      std::vector<int> w(std::size_t(total), 0);
      bool done = false;
      while (!done) {
        double whole = log_word_norm(c, w);
        for (int m = 1; m < total; ++m) {
          std::vector<int> head(w.begin(), w.begin() + m);
          std::vector<int> tail(w.begin() + m, w.end());
          CHECK(whole <= log_word_norm(c, head) + log_word_norm(c, tail) + 1e-10);
        }
        done = true;
        for (int i = total - 1; i >= 0; --i) {
          if (w[std::size_t(i)] == 0) {
            w[std::size_t(i)] = 1;
            std::fill(w.begin() + i + 1, w.end(), 0);
            done = false;
            break;
          }
        }
      }
    }
  }
}

TEST_CASE("property: singular value product equals |det|") {
  auto rng = make_rng(31);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int rep = 0; rep < 50; ++rep) {
    int d = 2 + rep % 3;
    Eigen::MatrixXd m(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) m(i, j) = u(rng);
    double prod = 1.0;
    for (double s : singular_values(m)) prod *= s;
    CHECK(prod == doctest::Approx(std::abs(m.determinant())).epsilon(1e-9));
  }
}

TEST_CASE("property: Bernoulli entropy + q lyapunov <= P_n(q) + slack") {
  auto c = scalar23();
  const double q = 1.0;
  auto curve = cocycle_pressure(c, q, 10);
  double pn = curve.back().value;
  for (double p : {0.1, 0.3, 0.4, 0.5, 0.7, 0.9}) {
    auto mu = MeasureModel::bernoulli({p, 1.0 - p});
    double h = -(p * std::log(p) + (1.0 - p) * std::log(1.0 - p));
    double lyap = lyapunov_cylinder_exact(c, mu, 6).value;
    CHECK(h + q * lyap <= pn + 1e-9);
  }
}

TEST_CASE("validate rejects malformed specs") {
  CocycleSpec empty;
  CHECK_THROWS_AS(empty.validate(), std::invalid_argument);
  CocycleSpec mixed{{Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(3, 3)}};
  CHECK_THROWS_AS(mixed.validate(), std::invalid_argument);
  CHECK_NOTHROW(scalar23().validate());
}
