#include "doctest.h"

#include <cmath>
#include <random>

#include "natf/system.hpp"
#include "natf/util.hpp"

using namespace natf;

TEST_CASE("iterate: doubling orbit of 0.3") {
  auto sys = DynamicalSystem::doubling();
  auto orbit = iterate(sys, Point::interval(0.3), 2);
  REQUIRE(orbit.size() == 3);
  CHECK(orbit[0].coordinate() == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(orbit[1].coordinate() == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(orbit[2].coordinate() == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("iterate: beta map at beta=2 matches doubling on sampled orbits") {
  auto d = DynamicalSystem::doubling();
  auto b = DynamicalSystem::beta_map(2.0);
  auto rng = make_rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    double x0 = u(rng);
    auto od = iterate(d, Point::interval(x0), 8);
    auto ob = iterate(b, Point::interval(x0), 8);
    for (std::size_t k = 0; k < od.size(); ++k)
      CHECK(od[k].coordinate() == doctest::Approx(ob[k].coordinate()).epsilon(1e-10));
  }
}

TEST_CASE("iterate: full shift moves the window") {
  auto sys = DynamicalSystem::full_shift(2);
  Point x = Point::shift({0, 1}, 2);  // 0,1,0,1,...
  auto orbit = iterate(sys, x, 1);
  REQUIRE(orbit.size() == 2);
  for (std::size_t j = 0; j < 6; ++j) CHECK(orbit[1].symbol(j) == x.symbol(j + 1));
}

TEST_CASE("iterate rejects invalid points") {
  auto sys = DynamicalSystem::doubling();
  CHECK_THROWS_AS(iterate(sys, Point::interval(1.5), 1), std::domain_error);
  auto shift = DynamicalSystem::full_shift(2);
  CHECK_THROWS_AS(iterate(shift, Point::shift({0, 3}, 1), 1), std::domain_error);
}

TEST_CASE("bowen_distance: hand orbit on doubling") {
  auto sys = DynamicalSystem::doubling();
  // orbits: 0 -> 0; 0.3 -> 0.6, so d_2 = max(0.3, 0.6)
  CHECK(bowen_distance(sys, Point::interval(0.0), Point::interval(0.3), 2) ==
        doctest::Approx(0.6).epsilon(1e-12));
  CHECK(bowen_distance(sys, Point::interval(0.0), Point::interval(0.3), 1) ==
        doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("bowen_distance: identical points and n=0 edge") {
  auto sys = DynamicalSystem::doubling();
  for (int n : {1, 3, 9}) CHECK(bowen_distance(sys, Point::interval(0.37), Point::interval(0.37), n) == 0.0);
  CHECK_THROWS_AS(bowen_distance(sys, Point::interval(0.1), Point::interval(0.2), 0),
                  std::invalid_argument);
}

TEST_CASE("bowen_distance: shift metric with long agreement") {
  auto sys = DynamicalSystem::full_shift(2);
  int n = 5;
  // agree on the first n+3 coordinates, differ right after
  std::vector<int> wx, wy;
  for (int j = 0; j < n + 3; ++j) {
    wx.push_back(j % 2);
    wy.push_back(j % 2);
  }
  wx.push_back(0);
  wy.push_back(1);
  double d = bowen_distance(sys, Point::shift(wx, 1), Point::shift(wy, 1), n);
  CHECK(d <= std::pow(2.0, -4) + 1e-15);
}

TEST_CASE("restricted_distance: orbit values on doubling") {
  auto sys = DynamicalSystem::doubling();
  Point x = Point::interval(0.0), y = Point::interval(0.3);
  CHECK(restricted_distance(sys, x, y, IndexSet::of({0}, 2)) ==
        doctest::Approx(0.3).epsilon(1e-12));
  // 0.5 -> 0 under doubling, so index {1} sees d(0, 0) = 0
  CHECK(restricted_distance(sys, Point::interval(0.0), Point::interval(0.5),
                            IndexSet::of({1}, 2)) == doctest::Approx(0.0));
  CHECK_THROWS_AS(restricted_distance(sys, x, y, IndexSet::of({}, 2)), std::invalid_argument);
}

TEST_CASE("restricted_distance: full index set equals bowen_distance") {
  auto sys = DynamicalSystem::doubling();
  auto rng = make_rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 40; ++rep) {
    Point x = Point::interval(u(rng)), y = Point::interval(u(rng));
    int n = 1 + rep % 8;
    CHECK(restricted_distance(sys, x, y, IndexSet::full(n)) ==
          doctest::Approx(bowen_distance(sys, x, y, n)).epsilon(1e-14));
  }
}

TEST_CASE("property: restricted distance is monotone in the index set") {
  auto sys = DynamicalSystem::doubling();
  auto rng = make_rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 8;
  for (int rep = 0; rep < 100; ++rep) {
    Point x = Point::interval(u(rng)), y = Point::interval(u(rng));
    std::vector<int> big, small;
    for (int i = 0; i < n; ++i)
      if (rng() & 1) {
        big.push_back(i);
        if (rng() & 1) small.push_back(i);
      }
    if (small.empty() || big.empty()) continue;
    CHECK(restricted_distance(sys, x, y, IndexSet::of(small, n)) <=
          restricted_distance(sys, x, y, IndexSet::of(big, n)) + 1e-15);
  }
}

TEST_CASE("property: bowen_distance nondecreasing in n") {
  for (auto sys : {DynamicalSystem::doubling(), DynamicalSystem::beta_map(2.718),
                   DynamicalSystem::manneville_pomeau(0.5)}) {
    auto rng = make_rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 60; ++rep) {
      Point x = Point::interval(u(rng)), y = Point::interval(u(rng));
      double prev = 0.0;
      for (int n = 1; n <= 10; ++n) {
        double d = bowen_distance(sys, x, y, n);
        CHECK(d >= prev - 1e-15);
        prev = d;
      }
    }
  }
}

TEST_CASE("property: shift bowen distance < 2^-k iff agreement on 0..n+k-1") {
  auto sys = DynamicalSystem::full_shift(2);
  // exhaustive over words of length n+k+1 for small n, k
  for (int n = 1; n <= 3; ++n) {
    for (int k = 0; k <= 2; ++k) {
      int len = n + k + 1;
      for (int a = 0; a < (1 << len); ++a) {
        for (int b = 0; b < (1 << len); ++b) {
          std::vector<int> wa, wb;
          for (int j = 0; j < len; ++j) {
            wa.push_back((a >> j) & 1);
            wb.push_back((b >> j) & 1);
          }
          Point x = Point::shift(wa, 1), y = Point::shift(wb, 1);
          bool agree = true;
          for (int j = 0; j < n + k && agree; ++j)
            if (x.symbol(std::size_t(j)) != y.symbol(std::size_t(j))) agree = false;
          bool close = bowen_distance(sys, x, y, n) < std::pow(2.0, -k);
          // tail beyond len is periodic with period 1; restrict to words whose
          // tails agree so the statement is about the first n+k coordinates only
          if (wa.back() == wb.back()) CHECK(close == agree);
        }
      }
    }
  }
}

TEST_CASE("metric axioms on sampled triples") {
  for (auto sys : {DynamicalSystem::doubling(), DynamicalSystem::beta_map(1.618)}) {
    auto rng = make_rng(19);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 80; ++rep) {
      Point a = Point::interval(u(rng)), b = Point::interval(u(rng)), c = Point::interval(u(rng));
      CHECK(sys.metric(a, b) == doctest::Approx(sys.metric(b, a)));
      CHECK(sys.metric(a, a) == 0.0);
      CHECK(sys.metric(a, c) <= sys.metric(a, b) + sys.metric(b, c) + 1e-12);
      if (!(a == b)) CHECK(sys.metric(a, b) > 0.0);
    }
  }
}

TEST_CASE("map sends the space into itself") {
  for (auto sys : {DynamicalSystem::doubling(), DynamicalSystem::beta_map(2.7),
                   DynamicalSystem::manneville_pomeau(0.3)}) {
    auto rng = make_rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 200; ++rep) {
      Point y = sys.apply(Point::interval(u(rng)));
      CHECK(y.coordinate() >= 0.0);
      CHECK(y.coordinate() < 1.0);
    }
  }
}

TEST_CASE("sft transitions are honored by apply/validate") {
  // golden-mean shift: no 11 factor
  auto sys = DynamicalSystem::sft(2, {1, 1, 1, 0});
  CHECK(sys.transition_allowed(0, 1));
  CHECK(!sys.transition_allowed(1, 1));
  CHECK_NOTHROW(sys.validate_point(Point::shift({0, 1, 0}, 1)));
  CHECK_THROWS_AS(sys.validate_point(Point::shift({1, 1}, 1)), std::domain_error);
}

TEST_CASE("manneville_pomeau branch cut solves c + c^(1+alpha) = 1") {
  for (double alpha : {0.2, 0.5, 0.8}) {
    auto sys = DynamicalSystem::manneville_pomeau(alpha);
    auto cuts = sys.branch_cuts();
    REQUIRE(cuts.size() == 1);
    double c = cuts[0];
    CHECK(c + std::pow(c, 1.0 + alpha) == doctest::Approx(1.0).epsilon(1e-10));
    // left branch is x + x^(1+alpha) below the cut
    double x = 0.5 * c;
    CHECK(sys.apply(Point::interval(x)).coordinate() ==
          doctest::Approx(x + std::pow(x, 1.0 + alpha)).epsilon(1e-12));
  }
}

TEST_CASE("symbolic_word reads branch digits") {
  auto sys = DynamicalSystem::doubling();
  // binary digits of 0.3: 0.3 -> 0, 0.6 -> 1, 0.2 -> 0, 0.4 -> 0, 0.8 -> 1
  auto w = symbolic_word(sys, Point::interval(0.3), 5);
  CHECK(w == std::vector<int>{0, 1, 0, 0, 1});
}
