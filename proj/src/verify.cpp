#include "natf/verify.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "natf/cocycle.hpp"
#include "natf/measure.hpp"
#include "natf/mistake.hpp"
#include "natf/system.hpp"
#include "natf/thermo.hpp"
#include "natf/util.hpp"

namespace natf {

namespace {

CheckResult subadditivity_check() {
  CheckResult res{"norm_potential_subadditivity", true, ""};
  std::vector<CocycleSpec> specs;
  specs.push_back({{Eigen::MatrixXd::Constant(1, 1, 2.0), Eigen::MatrixXd::Constant(1, 1, 3.0)}});
  Eigen::MatrixXd a(2, 2), b(2, 2);
  a << 1, 1, 1, 0;
  b << 2, 1, 0, 1;
  specs.push_back({{a, b}});

  double worst = 0.0;
  for (const auto& c : specs) {
    for (int len = 2; len <= 12; ++len) {
      std::vector<int> w(std::size_t(len), 0);
      bool done = false;
      while (!done) {
        double whole = log_word_norm(c, w);
        for (int m = 1; m < len; ++m) {
          std::vector<int> head(w.begin(), w.begin() + m);
          std::vector<int> tail(w.begin() + m, w.end());
          double defect = whole - log_word_norm(c, head) - log_word_norm(c, tail);
          worst = std::max(worst, defect);
        }
        // next binary word
        done = true;
        for (int i = len - 1; i >= 0; --i) {
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
  res.passed = worst <= 1e-9;
  std::ostringstream os;
  os << "max sub-additivity defect " << worst;
  res.detail = os.str();
  return res;
}

CheckResult mistake_monotonicity_check(std::uint64_t seed) {
  CheckResult res{"mistake_ball_monotonicity", true, ""};
  auto sys = DynamicalSystem::doubling();
  auto rng = make_rng(seed, 2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int failures = 0;
  const int n = 12;
  const double eps = 1.0 / 32.0;
  for (int rep = 0; rep < 10000; ++rep) {
    Point x = Point::interval(u(rng));
    Point y = u(rng) < 0.5 ? Point::interval(u(rng))
                           : Point::interval(std::fmod(x.coordinate() + eps * u(rng), 1.0));
    long long k = rep % 4;
    bool base = mistake_ball_contains(sys, constant_mistakes(k), x, y, n, eps);
    if (base) {
      // larger allowance, larger radius, shorter horizon: all contain y too
      if (!mistake_ball_contains(sys, constant_mistakes(k + 1), x, y, n, eps)) ++failures;
      if (!mistake_ball_contains(sys, constant_mistakes(k), x, y, n, 2 * eps)) ++failures;
      if (n > 1 && k == 0 && !mistake_ball_contains(sys, constant_mistakes(k), x, y, n - 1, eps))
        ++failures;
    }
    if (bowen_distance(sys, x, y, n) < eps &&
        !mistake_ball_contains(sys, zero_mistakes(), x, y, n, eps))
      ++failures;
  }
  res.passed = failures == 0;
  res.detail = std::to_string(failures) + " violations over 10000 pairs";
  return res;
}

CheckResult cylinder_count_check() {
  CheckResult res{"mistake_cylinder_counts", true, ""};
  double worst = 0.0;
  for (int ell : {2, 3}) {
    for (int n : {4, 8, 12}) {
      std::vector<int> center(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) center[std::size_t(i)] = (i * 7) % ell;
      for (long long g = 0; g <= 3; ++g) {
        long long brute = 0;
        std::vector<int> w(std::size_t(n), 0);
        bool done = false;
        while (!done) {
          long long h = 0;
          for (int i = 0; i < n; ++i)
            if (w[std::size_t(i)] != center[std::size_t(i)]) ++h;
          if (h <= g) ++brute;
          done = true;
          for (int i = n - 1; i >= 0; --i) {
            if (w[std::size_t(i)] < ell - 1) {
              w[std::size_t(i)]++;
              std::fill(w.begin() + i + 1, w.end(), 0);
              done = false;
              break;
            }
          }
        }
        double formula = mistake_ball_cylinder_count(ell, n, g);
        worst = std::max(worst, std::abs(formula - double(brute)));
      }
    }
  }
  res.passed = worst < 0.5;
  res.detail = "max |formula - brute force| = " + std::to_string(worst);
  return res;
}

CheckResult duality_check(std::uint64_t seed) {
  CheckResult res{"separated_spanning_duality", true, ""};
  auto sys = DynamicalSystem::doubling();
  auto rng = make_rng(seed, 4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 10;
  const double eps = 1.0 / 16.0;
  auto g = constant_mistakes(1);
  std::vector<Point> pts;
  for (int i = 0; i < 200; ++i) pts.push_back(Point::interval(u(rng)));

  // greedy maximal (g; n, eps)-separated subset
  std::vector<std::size_t> centers;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool ok = true;
    for (std::size_t c : centers) {
      std::vector<Point> pair{pts[i], pts[c]};
      if (!is_mistake_separated(sys, g, pair, n, eps).separated) {
        ok = false;
        break;
      }
    }
    if (ok) centers.push_back(i);
  }
  // maximality forces spanning: every point lies in some center's mistake ball
  // (non-strict membership)
  int uncovered = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool covered = false;
    for (std::size_t c : centers) {
      long long good = 0;
      auto ox = iterate(sys, pts[c], n - 1);
      auto oy = iterate(sys, pts[i], n - 1);
      for (int t = 0; t < n; ++t)
        if (sys.metric(ox[std::size_t(t)], oy[std::size_t(t)]) <= eps) ++good;
      if (good >= n - g(n, eps)) {
        covered = true;
        break;
      }
    }
    if (!covered) ++uncovered;
  }
  res.passed = uncovered == 0;
  res.detail = std::to_string(centers.size()) + " centers, " + std::to_string(uncovered) +
               " uncovered points";
  return res;
}

CheckResult singular_value_check(std::uint64_t seed) {
  CheckResult res{"singular_value_determinant", true, ""};
  auto rng = make_rng(seed, 5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double worst = 0.0;
  for (int rep = 0; rep < 64; ++rep) {
    int d = 2 + rep % 2;
    Eigen::MatrixXd m(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) m(i, j) = u(rng);
    double prod = 1.0;
    for (double s : singular_values(m)) prod *= s;
    worst = std::max(worst, std::abs(prod - std::abs(m.determinant())));
  }
  res.passed = worst <= 1e-9;
  res.detail = "max |prod(sigma) - |det|| = " + std::to_string(worst);
  return res;
}

CheckResult kingman_monotone_check() {
  CheckResult res{"kingman_monotone_averages", true, ""};
  Eigen::MatrixXd a(2, 2), b(2, 2);
  a << 1, 1, 1, 0;
  b << 2, 1, 0, 1;
  CocycleSpec c{{a, b}};
  auto sys = DynamicalSystem::full_shift(2);
  auto mu = MeasureModel::bernoulli({0.5, 0.5});
  auto phi = cocycle_potential(c, 1.0);
  auto est = kingman_functional(sys, phi, mu, {1, 2, 4, 8}, KingmanMode::CylinderExact);
  double worst = 0.0;
  for (std::size_t i = 1; i < est.per_n.size(); ++i)
    worst = std::max(worst, est.per_n[i].second - est.per_n[i - 1].second);
  res.passed = worst <= 1e-12;
  res.detail = "max increase along doubling schedule = " + std::to_string(worst);
  return res;
}

}  // namespace

std::vector<CheckResult> verification_suite(std::uint64_t seed) {
  std::vector<CheckResult> out;
  out.push_back(subadditivity_check());
  out.push_back(mistake_monotonicity_check(seed));
  out.push_back(cylinder_count_check());
  out.push_back(duality_check(seed));
  out.push_back(singular_value_check(seed));
  out.push_back(kingman_monotone_check());
  return out;
}

}  // namespace natf
