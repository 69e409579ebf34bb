#include "natf/mistake.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "natf/util.hpp"

namespace natf {

MistakeFunction zero_mistakes() {
  return {[](long long, double) { return 0LL; }, 1.0, "zero"};
}

MistakeFunction constant_mistakes(long long k) {
  if (k < 0) throw std::invalid_argument("constant_mistakes: k >= 0");
  return {[k](long long, double) { return k; }, 1.0, "constant"};
}

MistakeFunction sqrt_mistakes(double scale) {
  return {[scale](long long n, double) { return (long long)std::floor(scale * std::sqrt(double(n))); },
          1.0, "sqrt"};
}

MistakeFunction log_mistakes(double scale) {
  return {[scale](long long n, double) { return (long long)std::floor(scale * std::log(double(n) + 1.0)); },
          1.0, "log"};
}

bool mistake_ball_contains(const DynamicalSystem& sys, const MistakeFunction& g, const Point& x,
                           const Point& y, int n, double eps) {
  if (n < 1 || eps <= 0.0) throw std::invalid_argument("mistake_ball_contains: bad arguments");
  long long allowance = g(n, eps);
  if (allowance >= n) return true;  // empty requirement
  long long good = 0, bad = 0;
  Point a = x, b = y;
  long long needed = n - allowance;
  for (int i = 0; i < n; ++i) {
    if (sys.metric(a, b) < eps)
      ++good;
    else if (++bad > allowance)
      return false;
    if (good >= needed) return true;
    if (i + 1 < n) {
      a = sys.apply(a);
      b = sys.apply(b);
    }
  }
  return good >= needed;
}

SeparationResult is_mistake_separated(const DynamicalSystem& sys, const MistakeFunction& g,
                                      const std::vector<Point>& points, int n, double eps) {
  if (points.size() < 2) throw std::invalid_argument("is_mistake_separated: need >= 2 points");
  long long threshold = g(n, eps);
  // precompute orbits once
  std::vector<std::vector<Point>> orbits;
  orbits.reserve(points.size());
  for (const Point& p : points) orbits.push_back(iterate(sys, p, n - 1));
  SeparationResult res;
  res.separated = true;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      long long far = 0;
      for (int k = 0; k < n; ++k)
        if (sys.metric(orbits[i][std::size_t(k)], orbits[j][std::size_t(k)]) > eps) ++far;
      if (far <= threshold) {
        res.separated = false;
        res.violating_pair = {i, j};
        return res;
      }
    }
  }
  return res;
}

namespace {

// non-strict variant used by the dual (spanning) definition
bool mistake_ball_covers(const DynamicalSystem& sys, const std::vector<Point>& orbit_x,
                         const std::vector<Point>& orbit_y, int n, double eps,
                         long long allowance) {
  long long good = 0;
  for (int i = 0; i < n; ++i)
    if (sys.metric(orbit_x[std::size_t(i)], orbit_y[std::size_t(i)]) <= eps) ++good;
  return good >= n - allowance;
}

}  // namespace

SpanningResult greedy_spanning(const DynamicalSystem& sys, const MistakeFunction& g,
                               const std::vector<Point>& candidates, int n, double eps) {
  if (candidates.empty()) throw std::invalid_argument("greedy_spanning: empty candidates");
  long long allowance = g(n, eps);
  std::vector<std::vector<Point>> orbits;
  orbits.reserve(candidates.size());
  for (const Point& p : candidates) orbits.push_back(iterate(sys, p, n - 1));

  std::vector<bool> covered(candidates.size(), false);
  SpanningResult res;
  std::size_t remaining = candidates.size();
  while (remaining > 0) {
    std::size_t best = 0, best_gain = 0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      std::size_t gain = 0;
      for (std::size_t j = 0; j < candidates.size(); ++j)
        if (!covered[j] && mistake_ball_covers(sys, orbits[i], orbits[j], n, eps, allowance))
          ++gain;
      if (gain > best_gain) {
        best_gain = gain;
        best = i;
      }
    }
    if (best_gain == 0) break;  // cannot happen: each point covers itself
    res.centers.push_back(best);
    for (std::size_t j = 0; j < candidates.size(); ++j)
      if (!covered[j] && mistake_ball_covers(sys, orbits[best], orbits[j], n, eps, allowance)) {
        covered[j] = true;
        --remaining;
      }
  }
  // report how many of the chosen centers are pairwise separated
  if (res.centers.size() >= 2) {
    std::vector<Point> centers;
    for (auto i : res.centers) centers.push_back(candidates[i]);
    // greedy separated subset among centers
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < centers.size(); ++i) {
      bool ok = true;
      for (std::size_t j : kept) {
        long long far = 0;
        for (int k = 0; k < n; ++k)
          if (sys.metric(orbits[res.centers[i]][std::size_t(k)],
                         orbits[res.centers[j]][std::size_t(k)]) > eps)
            ++far;
        if (far <= allowance) {
          ok = false;
          break;
        }
      }
      if (ok) kept.push_back(i);
    }
    res.separated_subset_size = kept.size();
  } else {
    res.separated_subset_size = res.centers.size();
  }
  return res;
}

CoveringEstimate covering_number(const DynamicalSystem& sys, const MistakeFunction& g,
                                 const MeasureModel& mu, int n, double eps, double delta,
                                 long long samples, std::uint64_t seed) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("covering_number: delta in (0,1)");
  if (samples < 1) throw std::invalid_argument("covering_number: samples >= 1");
  CoveringEstimate est;
  est.n = n;
  est.eps = eps;
  est.delta = delta;
  est.method = "greedy_sample";
  est.low_sample_warning = delta * double(samples) < 100.0;

  auto rng = make_rng(seed);
  long long allowance = g(n, eps);
  int horizon = n + 40;  // enough symbols for shift metrics at small eps
  std::vector<std::vector<Point>> orbits;
  orbits.reserve(std::size_t(samples));
  for (long long i = 0; i < samples; ++i) {
    Point p = mu.sample(sys, rng, horizon);
    orbits.push_back(iterate(sys, p, n - 1));
  }
  std::vector<bool> covered(std::size_t(samples), false);
  long long covered_count = 0;
  long long target = (long long)std::ceil(delta * double(samples));
  if (target * 1.0 <= delta * double(samples)) ++target;  // strictly more than delta
  target = std::min(target, samples);
  while (covered_count < target) {
    std::size_t best = 0;
    long long best_gain = -1;
    for (std::size_t i = 0; i < orbits.size(); ++i) {
      if (covered[i]) continue;
      long long gain = 0;
      for (std::size_t j = 0; j < orbits.size(); ++j)
        if (!covered[j] && mistake_ball_covers(sys, orbits[i], orbits[j], n, eps, allowance))
          ++gain;
      if (gain > best_gain) {
        best_gain = gain;
        best = i;
      }
    }
    if (best_gain <= 0) break;
    est.count++;
    for (std::size_t j = 0; j < orbits.size(); ++j)
      if (!covered[j] && mistake_ball_covers(sys, orbits[best], orbits[j], n, eps, allowance)) {
        covered[j] = true;
        ++covered_count;
      }
  }
  est.covered_fraction = double(covered_count) / double(samples);
  if (est.count >= 1) est.entropy_slope = std::log(double(est.count)) / n;
  return est;
}

double log_mistake_ball_cylinder_count(int ell, long long n, long long g_value) {
  if (ell < 1 || n < 0 || g_value < 0 || g_value > n)
    throw std::invalid_argument("mistake_ball_cylinder_count: need 0 <= g <= n, ell >= 1");
  LogSumExp acc;
  double le = std::log(double(ell - 1));
  for (long long j = 0; j <= g_value; ++j) {
    if (ell == 1 && j > 0) break;
    acc.add(log_choose(n, j) + (ell > 1 ? double(j) * le : 0.0));
  }
  return acc.value();
}

double mistake_ball_cylinder_count(int ell, long long n, long long g_value) {
  if (ell < 1 || n < 0 || g_value < 0 || g_value > n)
    throw std::invalid_argument("mistake_ball_cylinder_count: need 0 <= g <= n, ell >= 1");
  long double total = 0.0L, term = 1.0L;  // term = C(n,j) (ell-1)^j
  for (long long j = 0; j <= g_value; ++j) {
    if (j > 0) {
      term *= (long double)(n - j + 1) / (long double)j;
      term *= (long double)(ell - 1);
      if (ell == 1) break;
    }
    total += term;
    if (total > 1e300L) return std::exp(log_mistake_ball_cylinder_count(ell, n, g_value));
  }
  return double(total);
}

EntropyEstimate katok_entropy(const DynamicalSystem& sys, const MeasureModel& mu,
                              const MistakeFunction& g, const std::vector<double>& eps_grid,
                              const std::vector<int>& n_grid, double delta, EntropyMode mode,
                              long long samples, std::uint64_t seed) {
  if (eps_grid.empty() || n_grid.empty())
    throw std::invalid_argument("katok_entropy: empty grids");
  for (std::size_t i = 1; i < eps_grid.size(); ++i)
    if (eps_grid[i] >= eps_grid[i - 1])
      throw std::invalid_argument("katok_entropy: eps_grid must decrease");
  for (std::size_t i = 1; i < n_grid.size(); ++i)
    if (n_grid[i] <= n_grid[i - 1])
      throw std::invalid_argument("katok_entropy: n_grid must increase");
  if (mode == EntropyMode::ExactCylinder && !mu.has_cylinder_mass(sys))
    throw std::domain_error("katok_entropy: measure has no exact cylinder masses");

  EntropyEstimate est;
  est.target = mu.entropy();
  int max_n = n_grid.back();
  long long ball_samples = std::min<long long>(samples, 512);

  for (double eps : eps_grid) {
    std::vector<double> slopes_x, slopes_y;
    for (int n : n_grid) {
      EntropyEstimate::Row row;
      row.eps = eps;
      row.n = n;
      long long gv = g(n, eps);
      // ball-mass rate averaged over mu-samples
      auto rng = make_rng(seed, std::uint64_t(n * 131 + int(1.0 / eps)));
      KahanSum rate;
      for (long long s = 0; s < ball_samples; ++s) {
        Point x = mu.sample(sys, rng, max_n + 40);
        double logmass;
        if (mode == EntropyMode::ExactCylinder) {
          auto w = symbolic_word(sys, x, n);
          logmass = mu.log_mistake_mass(sys, w, gv);
        } else {
          // Monte Carlo hit fraction against a reference sample cloud
          auto orbit_x = iterate(sys, x, n - 1);
          long long hits = 0;
          const long long probes = 512;
          auto rng2 = make_rng(seed, std::uint64_t(s) * 977 + 7);
          for (long long t = 0; t < probes; ++t) {
            Point y = mu.sample(sys, rng2, max_n + 40);
            auto orbit_y = iterate(sys, y, n - 1);
            if (mistake_ball_covers(sys, orbit_x, orbit_y, n, eps, gv)) ++hits;
          }
          logmass = hits > 0 ? std::log(double(hits) / double(probes)) : kNegInf;
        }
        if (logmass != kNegInf) rate.add(-logmass / n);
      }
      row.ball_rate = rate.value() / double(ball_samples);
      if (mode == EntropyMode::GreedySample) {
        auto cov = covering_number(sys, g, mu, n, eps, delta, std::min<long long>(samples, 2048),
                                   derive_seed(seed, std::uint64_t(n)));
        row.covering_slope = cov.entropy_slope;
        if (cov.entropy_slope) {
          slopes_x.push_back(double(n));
          slopes_y.push_back(*cov.entropy_slope * n);  // log N
        }
      }
      est.rows.push_back(row);
    }
    (void)slopes_x;
    (void)slopes_y;
  }
  // extrapolate in eps by last value, with trend flag
  double lo = kPosInf, hi = -kPosInf;
  double last_eps = eps_grid.back();
  for (const auto& r : est.rows) {
    if (r.eps != last_eps || r.n != n_grid.back()) continue;
    lo = std::min(lo, r.ball_rate);
    hi = std::max(hi, r.ball_rate);
    if (r.covering_slope) {
      lo = std::min(lo, *r.covering_slope);
      hi = std::max(hi, *r.covering_slope);
    }
  }
  est.lower_limit = lo;
  est.upper_limit = hi;
  if (eps_grid.size() >= 2 && n_grid.size() >= 2) {
    auto rate_at = [&](double eps, int n) {
      for (const auto& r : est.rows)
        if (r.eps == eps && r.n == n) return r.ball_rate;
      return 0.0;
    };
    est.trend_decreasing = rate_at(eps_grid.back(), n_grid.back()) <=
                           rate_at(eps_grid.front(), n_grid.back()) + 1e-12;
  }
  return est;
}

}  // namespace natf
