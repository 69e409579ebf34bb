#include "natf/potential.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "natf/util.hpp"

namespace natf {

double PotentialSequence::operator()(const DynamicalSystem& sys, const Point& x, int n) const {
  if (n < 1) throw std::invalid_argument("potential: n must be >= 1");
  return evaluator(sys, x, n);
}

double birkhoff_sum(const DynamicalSystem& sys, const std::function<double(const Point&)>& phi,
                    const Point& x, int n) {
  if (n < 1) throw std::invalid_argument("birkhoff_sum: n must be >= 1");
  KahanSum s;
  Point p = x;
  for (int i = 0; i < n; ++i) {
    s.add(phi(p));
    if (i + 1 < n) p = sys.apply(p);
  }
  return s.value();
}

PotentialSequence zero_potential() {
  PotentialSequence p;
  p.evaluator = [](const DynamicalSystem&, const Point&, int) { return 0.0; };
  p.declared_class = PotentialClass::Additive;
  p.name = "zero";
  return p;
}

PotentialSequence constant_potential(double a) {
  PotentialSequence p;
  p.evaluator = [a](const DynamicalSystem&, const Point&, int n) { return a * n; };
  p.declared_class = PotentialClass::Additive;
  p.name = "constant";
  return p;
}

PotentialSequence birkhoff_potential(std::function<double(const Point&)> phi, std::string name) {
  PotentialSequence p;
  auto f = std::move(phi);
  p.evaluator = [f](const DynamicalSystem& sys, const Point& x, int n) {
    return birkhoff_sum(sys, f, x, n);
  };
  p.declared_class = PotentialClass::Additive;
  p.approximants.push_back({0.0, f});
  p.name = std::move(name);
  return p;
}

PotentialSequence digit_frequency_potential(int digit) {
  PotentialSequence p;
  p.evaluator = [digit](const DynamicalSystem& sys, const Point& x, int n) {
    if (n < 1) throw std::invalid_argument("potential: n must be >= 1");
    auto w = symbolic_word(sys, x, n);
    return double(std::count(w.begin(), w.end(), digit));
  };
  p.declared_class = PotentialClass::Additive;
  p.name = "digit_frequency";
  return p;
}

PotentialSequence perturbed_potential(PotentialSequence base, std::function<double(int)> a_n,
                                      std::string name) {
  PotentialSequence p;
  auto b = std::move(base);
  auto a = std::move(a_n);
  p.evaluator = [b, a](const DynamicalSystem& sys, const Point& x, int n) {
    return b.evaluator(sys, x, n) + a(n);
  };
  p.declared_class = PotentialClass::AsymptoticallyAdditive;
  p.approximants = b.approximants;
  p.bowen_bound = a;  // declared drift, removable by downstream consumers
  p.name = std::move(name);
  return p;
}

ClassificationReport classify_sample(const PotentialSequence& phi, const DynamicalSystem& sys,
                                     const std::vector<Point>& sample_points, int m_max,
                                     int n_max, double tol_abs, double tol_rel) {
  if (sample_points.empty()) throw std::invalid_argument("classify_sample: empty sample");
  if (m_max < 1 || n_max < 1) throw std::invalid_argument("classify_sample: m_max, n_max >= 1");

  ClassificationReport rep;
  rep.tolerance_abs = tol_abs;
  rep.tolerance_rel = tol_rel;
  double max_defect = -kPosInf, min_defect = kPosInf, max_abs = 0.0;
  bool additive_ok = true, subadd_ok = true;
  for (const Point& x : sample_points) {
    for (int m = 1; m <= m_max; ++m) {
      Point fm = x;
      for (int i = 0; i < m; ++i) fm = sys.apply(fm);
      for (int n = 1; n <= n_max; ++n) {
        double a = phi(sys, x, m + n);
        double b = phi(sys, x, m);
        double c = phi(sys, fm, n);
        double defect = a - b - c;
        double tol = tol_abs + tol_rel * std::max(1.0, std::abs(b) + std::abs(c));
        max_defect = std::max(max_defect, defect);
        min_defect = std::min(min_defect, defect);
        max_abs = std::max(max_abs, std::abs(defect));
        if (std::abs(defect) > tol && additive_ok) {
          additive_ok = false;
          if (!rep.witness) rep.witness = DefectWitness{x, m, n, defect};
        }
        if (defect > tol && subadd_ok) {
          subadd_ok = false;
          rep.witness = DefectWitness{x, m, n, defect};
        }
      }
    }
  }
  rep.max_subadditive_defect = max_defect;
  rep.min_superadditive_defect = min_defect;
  rep.estimated_c = max_abs;
  rep.additive = additive_ok ? Verdict::Consistent : Verdict::Violated;
  rep.sub_additive = subadd_ok ? Verdict::Consistent : Verdict::Violated;
  // a finite sample is always consistent with some almost-additive constant
  rep.almost_additive = Verdict::Consistent;

  if (phi.approximants.empty()) {
    rep.asymptotically_additive = Verdict::NotCheckable;
  } else {
    bool ok = true;
    for (const auto& ap : phi.approximants) {
      ClassificationReport::AsymptoticDefect d;
      d.xi = ap.xi;
      for (int n = 1; n <= n_max + m_max; ++n) {
        double gap = 0.0;
        for (const Point& x : sample_points) {
          double v = phi(sys, x, n);
          double s = birkhoff_sum(sys, ap.phi, x, n);
          gap = std::max(gap, std::abs(v - s));
        }
        d.gap_per_n.emplace_back(n, gap / n);
      }
      double final_gap = d.gap_per_n.back().second;
      if (final_gap > ap.xi + tol_abs) ok = false;
      rep.asymptotic_defects.push_back(std::move(d));
    }
    rep.asymptotically_additive = ok ? Verdict::Consistent : Verdict::Violated;
  }
  return rep;
}

namespace {

// Smallest k with 2^-k < eps: agreement depth needed per index on shifts.
int shift_agreement_depth(double eps) {
  int k = 0;
  while (std::pow(2.0, -double(k)) >= eps) {
    ++k;
    if (k > 4096) throw std::invalid_argument("eps too small for shift probes");
  }
  return k;
}

}  // namespace

std::vector<Point> bowen_ball_probes(const DynamicalSystem& sys, const Point& x, int n,
                                     double eps, int probe_count, std::uint64_t seed) {
  if (n < 1 || eps <= 0.0 || probe_count < 1)
    throw std::invalid_argument("bowen_ball_probes: bad arguments");
  auto rng = make_rng(seed);
  std::vector<Point> probes;
  int attempted = 0;

  if (sys.is_shift()) {
    int k = shift_agreement_depth(eps);
    // members of B_n(x,eps) agree with x on coordinates 0..n+k-2
    std::size_t agree = std::size_t(n + k - 1);
    std::vector<int> base(agree);
    for (std::size_t j = 0; j < agree; ++j) base[j] = x.symbol(j);
    std::uniform_int_distribution<int> sym(0, sys.symbols() - 1);
    while (probes.size() < std::size_t(probe_count) && attempted < probe_count * 50) {
      ++attempted;
      std::vector<int> w = base;
      for (int extra = 0; extra < 4; ++extra) {
        int s = sym(rng);
        if (sys.kind() == DynamicalSystem::Kind::Sft && !sys.transition_allowed(w.back(), s))
          continue;
        w.push_back(s);
      }
      Point y = Point::shift(std::move(w), 1);
      try {
        sys.validate_point(y);
      } catch (const std::domain_error&) {
        continue;
      }
      if (bowen_distance(sys, x, y, n) < eps) probes.push_back(std::move(y));
    }
  } else {
    // bisect the largest one-sided offsets whose endpoints stay in the ball
    auto in_ball = [&](double y) {
      if (!(y >= 0.0 && y < 1.0)) return false;
      return bowen_distance(sys, x, Point::interval(y), n) < eps;
    };
    double x0 = x.coordinate();
    auto side_radius = [&](double dir) {
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        if (in_ball(x0 + dir * mid))
          lo = mid;
        else
          hi = mid;
      }
      return lo;
    };
    double rplus = side_radius(1.0), rminus = side_radius(-1.0);
    std::uniform_real_distribution<double> u(-rminus, rplus);
    while (probes.size() < std::size_t(probe_count) && attempted < probe_count * 50) {
      ++attempted;
      double y = x0 + u(rng);
      if (in_ball(y)) probes.push_back(Point::interval(y));
    }
  }
  if (probes.empty()) throw InsufficientProbesError(attempted);
  return probes;
}

double variation(const PotentialSequence& phi, const DynamicalSystem& sys, const Point& x,
                 int n, double eps, int probe_count, std::uint64_t seed) {
  if (eps <= 0.0) throw std::invalid_argument("variation: eps > 0 required");
  if (probe_count < 2) throw std::invalid_argument("variation: probe_count >= 2 required");
  auto probes = bowen_ball_probes(sys, x, n, eps, probe_count, seed);
  probes.push_back(x);
  double lo = kPosInf, hi = -kPosInf;
  for (const Point& y : probes) {
    double v = phi(sys, y, n);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi - lo;
}

VariationProfile variation_profile(const PotentialSequence& phi, const DynamicalSystem& sys,
                                   const Point& x, const std::vector<int>& n_list, double eps,
                                   int probe_count, std::uint64_t seed) {
  VariationProfile prof;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    int n = n_list[i];
    double v = variation(phi, sys, x, n, eps, probe_count, derive_seed(seed, i));
    prof.estimates.emplace_back(n, v);
    xs.push_back(double(n));
    ys.push_back(v / n);
  }
  if (xs.size() >= 2) prof.slope_per_n = least_squares(xs, ys).slope;
  return prof;
}

}  // namespace natf
