#include "doctest.h"

#include <cmath>
#include <random>
#include <set>

#include "natf/mistake.hpp"
#include "natf/util.hpp"

using namespace natf;

TEST_CASE("mistake function factories: monotone, sublinear, eps cutoff") {
  auto s = sqrt_mistakes();
  auto l = log_mistakes();
  for (long long n = 2; n <= 4096; n *= 2) {
    CHECK(s(n, 0.1) <= s(n + 1, 0.1));
    CHECK(l(n, 0.1) <= l(n + 1, 0.1));
  }
  CHECK(s(100, 0.1) == 10);
  CHECK(zero_mistakes()(57, 0.1) == 0);
  CHECK(constant_mistakes(3)(57, 0.1) == 3);
  // sublinearity along a log-spaced grid: g(n)/n decreasing envelope
  double prev = 2.0;
  for (long long n = 4; n <= 1 << 16; n *= 4) {
    double ratio = double(s(n, 0.1)) / double(n);
    CHECK(ratio <= prev + 1e-12);
    prev = ratio;
  }
  // eps above the cutoff clamps to eps0
  MistakeFunction dep{[](long long n, double eps) { return (long long)(n * eps); }, 0.25, "dep"};
  CHECK(dep(100, 0.9) == dep(100, 0.25));
}

TEST_CASE("mistake_ball_contains: hand example on doubling") {
  auto sys = DynamicalSystem::doubling();
  Point x = Point::interval(0.0), y = Point::interval(0.3);
  // orbit distances 0.3, 0.6: zero good indices at eps=0.25, need >= 2-1=1
  CHECK(!mistake_ball_contains(sys, constant_mistakes(1), x, y, 2, 0.25));
  CHECK(mistake_ball_contains(sys, constant_mistakes(2), x, y, 2, 0.25));
  // g >= n: vacuous membership
  CHECK(mistake_ball_contains(sys, constant_mistakes(10), x, y, 2, 0.25));
}

TEST_CASE("mistake_ball_contains: g=0 reduces to the Bowen ball") {
  auto sys = DynamicalSystem::doubling();
  auto rng = make_rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 300; ++rep) {
    Point x = Point::interval(u(rng)), y = Point::interval(u(rng));
    int n = 1 + rep % 10;
    double eps = 1.0 / double(2 + rep % 30);
    CHECK(mistake_ball_contains(sys, zero_mistakes(), x, y, n, eps) ==
          (bowen_distance(sys, x, y, n) < eps));
  }
}

TEST_CASE("is_mistake_separated: hand example and violating pair") {
  auto sys = DynamicalSystem::doubling();
  std::vector<Point> f{Point::interval(0.0), Point::interval(0.5)};
  // orbits (0,0) and (0.5,0): one index with distance 0.5 > 0.25
  CHECK(is_mistake_separated(sys, zero_mistakes(), f, 2, 0.25).separated);
  auto r = is_mistake_separated(sys, constant_mistakes(1), f, 2, 0.25);
  CHECK(!r.separated);
  REQUIRE(r.violating_pair.has_value());
  CHECK(r.violating_pair->first == 0);
  CHECK(r.violating_pair->second == 1);
  // duplicates are never separated
  std::vector<Point> dup{Point::interval(0.2), Point::interval(0.2)};
  CHECK(!is_mistake_separated(sys, zero_mistakes(), dup, 4, 0.1).separated);
}

TEST_CASE("greedy_spanning: degenerate cases") {
  auto sys = DynamicalSystem::doubling();
  // tight cluster: one center suffices
  std::vector<Point> cluster;
  for (int i = 0; i < 12; ++i) cluster.push_back(Point::interval(0.5 + 1e-9 * i));
  auto r1 = greedy_spanning(sys, zero_mistakes(), cluster, 3, 0.1);
  CHECK(r1.centers.size() == 1);
  // g(n) = n: everything inside one mistake ball
  std::vector<Point> spread;
  for (int i = 0; i < 20; ++i) spread.push_back(Point::interval(i / 20.0));
  MistakeFunction all{[](long long n, double) { return n; }, 1.0, "all"};
  auto r2 = greedy_spanning(sys, all, spread, 5, 0.01);
  CHECK(r2.centers.size() == 1);
}

TEST_CASE("greedy_spanning: cylinder cover count on the full shift") {
  auto sys = DynamicalSystem::full_shift(2);
  const int n = 4;
  // spanning uses non-strict distances: d <= 1/4 forces agreement on two
  // symbols per iterate, so the (n,1/4)-balls are exactly (n+1)-cylinders and
  // the greedy cover of all (n+2)-words has 2^(n+1) centers
  std::vector<Point> candidates;
  for (int mask = 0; mask < (1 << (n + 2)); ++mask) {
    std::vector<int> w;
    for (int j = 0; j < n + 2; ++j) w.push_back((mask >> j) & 1);
    candidates.push_back(Point::shift(w, 1));
  }
  auto r = greedy_spanning(sys, zero_mistakes(), candidates, n, 0.25);
  CHECK(r.centers.size() == std::size_t(1 << (n + 1)));
  CHECK(r.separated_subset_size == r.centers.size());
}

TEST_CASE("covering_number: uniform Bernoulli cylinders at eps=1/2") {
  auto sys = DynamicalSystem::full_shift(2);
  auto mu = MeasureModel::bernoulli({0.5, 0.5});
  const int n = 6;
  // with eps=1/2, (n,1/2)-balls are n-cylinders; covering half the mass
  // needs 2^(n-1) of them
  auto est = covering_number(sys, zero_mistakes(), mu, n, 0.5, 0.5, 4000, 7);
  // sampling noise lets the greedy stop a little below the ideal 2^(n-1)
  CHECK(est.count >= (1 << (n - 1)) * 3 / 4);
  CHECK(est.count <= (1 << (n - 1)));
  CHECK(est.covered_fraction > 0.5);
  CHECK(!est.low_sample_warning);
  // g = 1 shrinks the cover roughly by the Hamming-ball size n+1
  auto est1 = covering_number(sys, constant_mistakes(1), mu, n, 0.5, 0.5, 4000, 7);
  double ratio = double(est.count) / double(est1.count) / double(n + 1);
  CHECK(ratio > 0.5);
  CHECK(ratio < 2.0);
  // single sample, tiny delta
  auto est2 = covering_number(sys, zero_mistakes(), mu, n, 0.5, 1e-6, 1, 7);
  CHECK(est2.count == 1);
  CHECK(est2.low_sample_warning);
}

TEST_CASE("mistake_ball_cylinder_count: examples and log consistency") {
  CHECK(mistake_ball_cylinder_count(2, 5, 0) == 1.0);
  CHECK(mistake_ball_cylinder_count(2, 5, 2) == 16.0);
  CHECK(mistake_ball_cylinder_count(3, 4, 1) == 9.0);
  CHECK(mistake_ball_cylinder_count(2, 10, 10) == 1024.0);
  for (int ell : {2, 3, 5}) {
    for (long long n : {8LL, 40LL, 400LL}) {
      for (long long g : {0LL, 3LL, n / 5}) {
        double direct = mistake_ball_cylinder_count(ell, n, g);
        double viaLog = log_mistake_ball_cylinder_count(ell, n, g);
        CHECK(std::log(direct) == doctest::Approx(viaLog).epsilon(1e-10));
      }
    }
  }
  // sub-linear g keeps the per-symbol log rate vanishing
  double rate400 = log_mistake_ball_cylinder_count(2, 400, 20) / 400.0;
  double rate10000 = log_mistake_ball_cylinder_count(2, 10000, 100) / 10000.0;
  CHECK(rate10000 < rate400);
}

TEST_CASE("property: mistake balls grow with g and shrink under inclusion checks") {
  auto sys = DynamicalSystem::doubling();
  auto rng = make_rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 10;
  const double eps = 1.0 / 16.0;
  for (int rep = 0; rep < 500; ++rep) {
    Point x = Point::interval(u(rng));
    Point y = Point::interval(std::fmod(x.coordinate() + eps * u(rng) * 3.0, 1.0));
    for (long long g = 0; g < 4; ++g) {
      bool small = mistake_ball_contains(sys, constant_mistakes(g), x, y, n, eps);
      bool big = mistake_ball_contains(sys, constant_mistakes(g + 1), x, y, n, eps);
      if (small) CHECK(big);  // B_n(g1) subset of B_n(g2) when g1 <= g2
    }
    // Bowen ball inside every mistake ball
    if (bowen_distance(sys, x, y, n) < eps)
      CHECK(mistake_ball_contains(sys, sqrt_mistakes(), x, y, n, eps));
  }
}

TEST_CASE("property: a separated set cannot be spanned by fewer of its own points (g=0)") {
  auto sys = DynamicalSystem::doubling();
  const int n = 6;
  const double eps = 1.0 / 8.0;
  std::vector<Point> pts;
  for (int i = 0; i < 10; ++i) pts.push_back(Point::interval((i + 0.5) / 10.0));
  // thin to a separated subset first
  std::vector<Point> sep;
  for (const auto& p : pts) {
    std::vector<Point> trial = sep;
    trial.push_back(p);
    if (trial.size() < 2 || is_mistake_separated(sys, zero_mistakes(), trial, n, eps).separated)
      sep = trial;
  }
  REQUIRE(sep.size() >= 2);
  auto span = greedy_spanning(sys, zero_mistakes(), sep, n, eps);
  CHECK(span.centers.size() == sep.size());
}

TEST_CASE("katok_entropy: exact cylinder mode on doubling/Lebesgue") {
  auto sys = DynamicalSystem::doubling();
  auto mu = MeasureModel::lebesgue();
  auto est = katok_entropy(sys, mu, zero_mistakes(), {0.05, 0.01}, {10, 15, 20}, 0.5,
                           EntropyMode::ExactCylinder, 64, 3);
  CHECK(est.lower_limit == doctest::Approx(std::log(2.0)).epsilon(0.05));
  CHECK(est.upper_limit == doctest::Approx(std::log(2.0)).epsilon(0.05));
  CHECK(est.lower_limit <= est.upper_limit + 1e-9);
}

TEST_CASE("katok_entropy: sqrt mistakes reach the same limit, matching the exact oracle") {
  auto sys = DynamicalSystem::doubling();
  auto mu = MeasureModel::lebesgue();
  auto g = sqrt_mistakes();
  const int n = 20;
  auto est = katok_entropy(sys, mu, g, {0.01}, {n}, 0.5, EntropyMode::ExactCylinder, 64, 3);
  REQUIRE(est.rows.size() == 1);
  long long gv = g(n, 0.01);
  double oracle = std::log(2.0) - log_mistake_ball_cylinder_count(2, n, gv) / n;
  CHECK(est.rows[0].ball_rate == doctest::Approx(oracle).epsilon(1e-9));
  // the sqrt correction (1/m) log #ball decays like log(m)/sqrt(m): the
  // mistake rate creeps back toward the g=0 rate as m grows
  double prev = kPosInf;
  for (int m : {20, 100, 400}) {
    auto em = katok_entropy(sys, mu, g, {0.01}, {m}, 0.5, EntropyMode::ExactCylinder, 16, 3);
    double corr = std::log(2.0) - em.rows[0].ball_rate;
    double predicted = log_mistake_ball_cylinder_count(2, m, g(m, 0.01)) / m;
    CHECK(corr == doctest::Approx(predicted).epsilon(1e-9));
    CHECK(corr < prev);
    prev = corr;
  }
}

TEST_CASE("katok_entropy: full 2-shift with Bernoulli(1/2) gives log 2") {
  auto sys = DynamicalSystem::full_shift(2);
  auto mu = MeasureModel::bernoulli({0.5, 0.5});
  auto est = katok_entropy(sys, mu, zero_mistakes(), {0.25}, {8, 12, 16}, 0.5,
                           EntropyMode::ExactCylinder, 64, 3);
  CHECK(est.upper_limit == doctest::Approx(std::log(2.0)).epsilon(0.02));
  REQUIRE(est.target.has_value());
  CHECK(*est.target == doctest::Approx(std::log(2.0)));
}

TEST_CASE("katok_entropy: greedy sample mode stays near the exact value") {
  auto sys = DynamicalSystem::doubling();
  auto mu = MeasureModel::lebesgue();
  // eps = 1/4 keeps the ball mass ~2^-(n+1), resolvable by 512 probes; the
  // hit-fraction estimator then sees rates near ((n+1)/n) log 2
  auto est = katok_entropy(sys, mu, zero_mistakes(), {0.25}, {3, 5}, 0.5,
                           EntropyMode::GreedySample, 512, 3);
  for (const auto& row : est.rows) {
    double expect = std::log(2.0) * double(row.n + 1) / double(row.n);
    CHECK(row.ball_rate > 0.6 * std::log(2.0));
    CHECK(row.ball_rate < 1.6 * std::log(2.0));
    CHECK(row.ball_rate == doctest::Approx(expect).epsilon(0.25));
    if (row.covering_slope) CHECK(*row.covering_slope == doctest::Approx(std::log(2.0)).epsilon(0.35));
  }
  // grid validation errors
  CHECK_THROWS_AS(katok_entropy(sys, mu, zero_mistakes(), {0.01, 0.05}, {8, 12}, 0.5,
                                EntropyMode::ExactCylinder),
                  std::invalid_argument);
  CHECK_THROWS_AS(katok_entropy(sys, mu, zero_mistakes(), {0.05, 0.01}, {12, 8}, 0.5,
                                EntropyMode::ExactCylinder),
                  std::invalid_argument);
}
