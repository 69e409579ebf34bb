#include "natf/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "natf/cocycle.hpp"
#include "natf/util.hpp"

namespace natf {

namespace {

double word_count_bound(int l, int n) { return std::pow(double(l), double(n)); }

}  // namespace

KingmanEstimate kingman_functional(const DynamicalSystem& sys, const PotentialSequence& phi,
                                   const MeasureModel& mu, const std::vector<int>& n_list,
                                   KingmanMode mode, long long samples, std::uint64_t seed,
                                   long long budget) {
  if (n_list.empty()) throw std::invalid_argument("kingman_functional: empty n schedule");
  KingmanEstimate est;
  est.invariance_warning = !mu.invariant();
  int max_n = *std::max_element(n_list.begin(), n_list.end());

  for (std::size_t k = 0; k < n_list.size(); ++k) {
    int n = n_list[k];
    if (n < 1) throw std::invalid_argument("kingman_functional: n >= 1 required");
    double mean = 0.0, err = 0.0;
    if (mode == KingmanMode::CylinderExact) {
      if (!mu.has_cylinder_mass(sys))
        throw std::domain_error("kingman_functional: measure has no exact cylinder masses");
      if (word_count_bound(sys.branch_count(), n) > double(budget)) throw BudgetError(budget);
      KahanSum acc;
      for_each_word(sys, n, [&](const std::vector<int>& w) {
        double lm = mu.log_cylinder_mass(sys, w);
        if (lm == kNegInf) return;
        acc.add(std::exp(lm) * phi(sys, cylinder_representative(sys, w), n));
      });
      mean = acc.value() / n;
    } else {
      auto rng = make_rng(seed, std::uint64_t(n));
      KahanSum s, s2;
      for (long long i = 0; i < samples; ++i) {
        double v = phi(sys, mu.sample(sys, rng, max_n + 1), n) / n;
        s.add(v);
        s2.add(v * v);
      }
      mean = s.value() / double(samples);
      double var = std::max(0.0, s2.value() / double(samples) - mean * mean);
      err = std::sqrt(var / double(samples));
    }
    est.per_n.emplace_back(n, mean);
    est.std_errors.push_back(err);
    if (k == 0 || mean < est.value) {
      est.value = mean;
      est.argmin_n = n;
    }
  }
  switch (phi.declared_class) {
    case PotentialClass::Additive:
      est.direction = mode == KingmanMode::CylinderExact ? BoundDirection::Exact
                                                         : BoundDirection::TwoSided;
      break;
    case PotentialClass::SubAdditive:
      est.direction = BoundDirection::UpperBound;
      break;
    default:
      est.direction = BoundDirection::TwoSided;
      break;
  }
  return est;
}

PressureEstimate cylinder_pressure(const DynamicalSystem& sys, const PotentialSequence& phi,
                                   int n_max, long long budget) {
  if (n_max < 1) throw std::invalid_argument("cylinder_pressure: n_max >= 1");
  PressureEstimate est;
  est.method = "cylinder";
  est.z_definition =
      "Z_n = sum over admissible n-words of exp(phi_n(rep)); rep = periodic word "
      "on shifts, left cylinder endpoint on interval maps";
  double total_words = 0.0;
  std::vector<double> values;
  for (int n = 1; n <= n_max; ++n) {
    total_words += word_count_bound(sys.branch_count(), n);
    if (total_words > double(budget)) throw BudgetError(budget);
    LogSumExp z;
    for_each_word(sys, n, [&](const std::vector<int>& w) {
      if (sys.is_interval()) {
        auto [a, b] = MeasureModel::beta_cylinder_interval(sys, w);
        if (b <= a) return;  // inadmissible beta word
      }
      z.add(phi(sys, cylinder_representative(sys, w), n));
    });
    double v = z.value() / n;
    values.push_back(v);
    est.per_n.emplace_back(n, v);
  }
  est.monotone = true;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[i - 1] + 1e-12) est.monotone = false;
  auto extr = aitken_extrapolate(values);
  est.value = extr ? *extr : values.back();
  return est;
}

PressureEstimate separated_pressure(const DynamicalSystem& sys, const PotentialSequence& phi,
                                    int n, double eps, double grid_resolution) {
  if (!sys.is_interval())
    throw std::domain_error("separated_pressure: interval systems only (use cylinder_pressure)");
  if (!(grid_resolution > 0.0 && grid_resolution < eps))
    throw std::invalid_argument("separated_pressure: need 0 < grid_resolution < eps");

  auto run = [&](double r) {
    long long count = (long long)std::floor(1.0 / r);
    std::vector<std::vector<Point>> orbits;
    std::vector<double> weight(static_cast<std::size_t>(count));
    orbits.reserve(std::size_t(count));
    for (long long i = 0; i < count; ++i) {
      Point x = Point::interval((double(i) + 0.5) * r);
      orbits.push_back(iterate(sys, x, n - 1));
      weight[std::size_t(i)] = phi(sys, x, n);
    }
    std::vector<std::size_t> order(static_cast<std::size_t>(count));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return weight[a] > weight[b]; });
    auto bowen = [&](std::size_t a, std::size_t b) {
      double d = 0.0;
      for (int i = 0; i < n; ++i)
        d = std::max(d, sys.metric(orbits[a][std::size_t(i)], orbits[b][std::size_t(i)]));
      return d;
    };
    std::vector<std::size_t> chosen;
    LogSumExp z;
    for (std::size_t idx : order) {
      bool ok = true;
      for (std::size_t c : chosen)
        if (bowen(idx, c) <= eps) {
          ok = false;
          break;
        }
      if (ok) {
        chosen.push_back(idx);
        z.add(weight[idx]);
      }
    }
    return z.value() / n;
  };

  PressureEstimate est;
  est.method = "separated";
  est.z_definition = "Z_n = sum over a greedy maximal (n,eps)-separated grid subset of exp(phi_n)";
  est.eps = eps;
  est.grid_resolution = grid_resolution;
  est.value = run(grid_resolution);
  est.refined_value = run(grid_resolution / 2.0);
  est.per_n.emplace_back(n, est.value);
  est.drift = std::abs(est.refined_value - est.value) / std::max(1.0, std::abs(est.value));
  est.unconverged = est.drift > 0.05;
  est.monotone = true;
  return est;
}

MeasureFamily bernoulli_family(int symbols) {
  if (symbols < 2) throw std::invalid_argument("bernoulli_family: symbols >= 2");
  MeasureFamily f;
  f.name = "bernoulli";
  f.weight_count = symbols;
  f.make = [](const std::vector<double>& p) { return MeasureModel::bernoulli(p); };
  return f;
}

MeasureFamily restricted_bernoulli_family(int symbols,
                                          std::function<bool(const std::vector<double>&)> cut,
                                          std::string name) {
  MeasureFamily f = bernoulli_family(symbols);
  f.name = std::move(name);
  f.feasible = std::move(cut);
  return f;
}

namespace {

std::vector<double> softmax_point(const std::vector<double>& z) {
  std::vector<double> p(z.size() + 1);
  double m = 0.0;
  for (double v : z) m = std::max(m, v);
  double denom = std::exp(-m);
  for (std::size_t i = 0; i < z.size(); ++i) denom += std::exp(z[i] - m);
  for (std::size_t i = 0; i < z.size(); ++i) p[i] = std::exp(z[i] - m) / denom;
  p.back() = std::exp(-m) / denom;
  // exact renormalization guards the bernoulli constructor's 1e-12 gate
  double s = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& v : p) v /= s;
  return p;
}

std::vector<double> logit_point(const std::vector<double>& p) {
  std::vector<double> z(p.size() - 1);
  double base = std::max(p.back(), 1e-12);
  for (std::size_t i = 0; i + 1 < p.size(); ++i)
    z[i] = std::log(std::max(p[i], 1e-12)) - std::log(base);
  return z;
}

}  // namespace

FamilyOptimum maximize_over_family(
    const MeasureFamily& family,
    const std::function<double(const MeasureModel&, const std::vector<double>&)>& objective,
    const std::function<double(const MeasureModel&, const std::vector<double>&)>& constraint_slack,
    int grid, int polish_iterations) {
  int k = family.weight_count;
  if (k < 2) throw std::invalid_argument("maximize_over_family: weight_count >= 2");
  constexpr double kPenalty = 1e4;

  auto penalized = [&](const std::vector<double>& p, bool* feasible) -> double {
    if (family.feasible && !family.feasible(p)) {
      if (feasible) *feasible = false;
      return -1e15;
    }
    MeasureModel m = family.make(p);
    double slack = constraint_slack ? constraint_slack(m, p) : 0.0;
    if (feasible) *feasible = slack >= -1e-12;
    return objective(m, p) - kPenalty * std::max(0.0, -slack);
  };

  FamilyOptimum best;
  best.value = kNegInf;

  // simplex grid seed: weights i/grid, smoothed off the exact boundary
  std::vector<int> comp(std::size_t(k), 0);
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == k - 1) {
      comp[std::size_t(pos)] = left;
      std::vector<double> p(static_cast<std::size_t>(k));
      for (int i = 0; i < k; ++i)
        p[std::size_t(i)] = (double(comp[std::size_t(i)]) / grid) * (1.0 - 1e-9 * k) + 1e-9;
      bool feasible = false;
      double v = penalized(p, &feasible);
      if (feasible && v > best.value) {
        best.value = v;
        best.argmax = p;
        best.feasible_found = true;
      }
      return;
    }
    for (int c = 0; c <= left; ++c) {
      comp[std::size_t(pos)] = c;
      rec(pos + 1, left - c);
    }
  };
  rec(0, grid);
  if (!best.feasible_found) {
    best.value = kNegInf;
    return best;
  }

  // Nelder-Mead polish in softmax coordinates
  int d = k - 1;
  auto eval_z = [&](const std::vector<double>& z) { return penalized(softmax_point(z), nullptr); };
  std::vector<std::vector<double>> simplex;
  std::vector<double> fv;
  std::vector<double> z0 = logit_point(best.argmax);
  simplex.push_back(z0);
  fv.push_back(eval_z(z0));
  for (int i = 0; i < d; ++i) {
    auto z = z0;
    z[std::size_t(i)] += 0.25;
    simplex.push_back(z);
    fv.push_back(eval_z(z));
  }
  auto order = [&] {
    std::vector<std::size_t> idx(simplex.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fv[a] > fv[b]; });
    std::vector<std::vector<double>> s2;
    std::vector<double> f2;
    for (auto i : idx) {
      s2.push_back(simplex[i]);
      f2.push_back(fv[i]);
    }
    simplex = std::move(s2);
    fv = std::move(f2);
  };
  for (int it = 0; it < polish_iterations; ++it) {
    order();
    double spread = 0.0;
    for (std::size_t i = 1; i < simplex.size(); ++i)
      for (int j = 0; j < d; ++j)
        spread = std::max(spread, std::abs(simplex[i][std::size_t(j)] - simplex[0][std::size_t(j)]));
    if (spread < 1e-9) break;
    std::vector<double> centroid(std::size_t(d), 0.0);
    for (std::size_t i = 0; i + 1 < simplex.size(); ++i)
      for (int j = 0; j < d; ++j) centroid[std::size_t(j)] += simplex[i][std::size_t(j)] / d;
    auto point_along = [&](double t) {
      std::vector<double> z(static_cast<std::size_t>(d));
      for (int j = 0; j < d; ++j)
        z[std::size_t(j)] =
            centroid[std::size_t(j)] + t * (centroid[std::size_t(j)] - simplex.back()[std::size_t(j)]);
      return z;
    };
    auto zr = point_along(1.0);
    double fr = eval_z(zr);
    if (fr > fv.front()) {
      auto ze = point_along(2.0);
      double fe = eval_z(ze);
      if (fe > fr) {
        simplex.back() = ze;
        fv.back() = fe;
      } else {
        simplex.back() = zr;
        fv.back() = fr;
      }
    } else if (fr > fv[fv.size() - 2]) {
      simplex.back() = zr;
      fv.back() = fr;
    } else {
      auto zc = point_along(0.5);
      double fc = eval_z(zc);
      if (fc > fv.back()) {
        simplex.back() = zc;
        fv.back() = fc;
      } else {
        for (std::size_t i = 1; i < simplex.size(); ++i) {
          for (int j = 0; j < d; ++j)
            simplex[i][std::size_t(j)] =
                0.5 * (simplex[i][std::size_t(j)] + simplex[0][std::size_t(j)]);
          fv[i] = eval_z(simplex[i]);
        }
      }
    }
  }
  order();
  std::vector<double> p = softmax_point(simplex.front());
  bool feasible = false;
  double v = penalized(p, &feasible);
  if (feasible && v > best.value) {
    best.value = v;
    best.argmax = p;
  }
  return best;
}

VariationalGapReport variational_gap(const DynamicalSystem& sys, const PotentialSequence& phi,
                                     const MeasureFamily& family, double pressure,
                                     const std::vector<int>& n_list, int grid) {
  auto objective = [&](const MeasureModel& m, const std::vector<double>&) {
    auto h = m.entropy();
    if (!h) throw std::domain_error("variational_gap: family member without closed-form entropy");
    auto f = kingman_functional(sys, phi, m, n_list, KingmanMode::CylinderExact);
    return *h + f.value;
  };
  FamilyOptimum opt = maximize_over_family(family, objective, nullptr, grid);
  VariationalGapReport rep;
  rep.pressure = pressure;
  rep.best_value = opt.value;
  rep.gap = pressure - opt.value;
  rep.argmax = opt.argmax;
  rep.satisfied = rep.gap >= -1e-6;
  return rep;
}

GibbsReport weak_gibbs_check(const DynamicalSystem& sys, const PotentialSequence& phi,
                             const MeasureModel& nu, double pressure, int sample_count,
                             const std::vector<int>& n_list, double eps, std::uint64_t seed,
                             double gibbs_threshold) {
  if (n_list.empty()) throw std::invalid_argument("weak_gibbs_check: empty n schedule");
  if (!nu.has_cylinder_mass(sys))
    throw std::domain_error("weak_gibbs_check: measure has no exact ball/cylinder masses");
  GibbsReport rep;
  rep.sample_count = sample_count;
  rep.eps = eps;
  rep.gibbs_threshold = gibbs_threshold;
  int max_n = *std::max_element(n_list.begin(), n_list.end());

  auto rng = make_rng(seed);
  std::vector<Point> xs;
  xs.reserve(std::size_t(sample_count));
  for (int i = 0; i < sample_count; ++i) xs.push_back(nu.sample(sys, rng, max_n + 1));

  std::vector<double> slope_x, slope_y;
  for (int n : n_list) {
    double max_abs_log_r = 0.0;
    for (const Point& x : xs) {
      auto w = symbolic_word(sys, x, n);
      double lm = nu.log_cylinder_mass(sys, w);
      if (lm == kNegInf) {
        rep.excluded++;
        continue;
      }
      double log_r = lm - (-double(n) * pressure + phi(sys, x, n));
      max_abs_log_r = std::max(max_abs_log_r, std::abs(log_r));
    }
    GibbsReport::Row row;
    row.n = n;
    row.K_n = std::exp(max_abs_log_r);
    row.log_K_over_n = max_abs_log_r / n;
    rep.rows.push_back(row);
    rep.sup_K = std::max(rep.sup_K, row.K_n);
    slope_x.push_back(double(n));
    slope_y.push_back(row.log_K_over_n);
  }
  rep.slope = slope_x.size() >= 2 ? least_squares(slope_x, slope_y).slope : 0.0;

  bool trend_ok = rep.rows.back().log_K_over_n <= rep.rows.front().log_K_over_n + 1e-9;
  bool weak_ok = std::abs(rep.slope) <= 0.02 && trend_ok;
  if (weak_ok && rep.sup_K <= gibbs_threshold)
    rep.verdict = GibbsReport::Verdict::Gibbs;
  else if (weak_ok)
    rep.verdict = GibbsReport::Verdict::WeakGibbs;
  else
    rep.verdict = GibbsReport::Verdict::Violated;
  return rep;
}

}  // namespace natf
