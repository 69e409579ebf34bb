#include "natf/deviation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "natf/cocycle.hpp"
#include "natf/util.hpp"

namespace natf {

namespace {

constexpr double kLatticeTol = 1e-9;

// Declared drift a_n of the observable (asymptotically additive perturbations
// carry their a_n in bowen_bound); deviation sets are defined on the
// drift-normalized averages.
double drift_of(const PotentialSequence& psi, int n) {
  return psi.bowen_bound ? psi.bowen_bound(n) : 0.0;
}

bool event_holds(const DeviationQuery& q, double avg) {
  switch (q.mode) {
    case ThresholdMode::AtLeast:
      return avg >= q.threshold - kLatticeTol;
    case ThresholdMode::GreaterThan:
      return avg > q.threshold + kLatticeTol;
    case ThresholdMode::AbsGap:
      return std::abs(avg - *q.center) > q.threshold - kLatticeTol;
  }
  return false;
}

// Verifies the declared per-symbol reduction against the evaluator on a few
// reference samples; a wrong declaration is a hard error, not a silent bias.
void audit_iid_reduction(const DeviationQuery& q, int n, std::uint64_t seed) {
  auto rng = make_rng(seed, 0xa0d17ULL);
  for (int rep = 0; rep < 5; ++rep) {
    Point x = q.reference.sample(q.sys, rng, n + 1);
    auto w = symbolic_word(q.sys, x, n);
    KahanSum s;
    for (int c : w) s.add((*q.iid_values)[std::size_t(c)]);
    double direct = q.observable(q.sys, x, n) - drift_of(q.observable, n);
    if (std::abs(s.value() - direct) > 1e-9 * std::max(1.0, std::abs(direct)))
      throw std::invalid_argument("deviation_measure: iid_values disagree with the observable");
  }
}

// Bernoulli success probability of "symbol 1" for binary product references.
double binary_success_probability(const DeviationQuery& q) {
  if (q.reference.kind() == MeasureModel::Kind::Bernoulli) return q.reference.probabilities()[1];
  return 0.5;  // Lebesgue on a full-branch uniform binary map
}

bool binary_iid_exact_available(const DeviationQuery& q) {
  if (!q.iid_values || q.iid_values->size() != 2) return false;
  if (q.reference.kind() == MeasureModel::Kind::Bernoulli)
    return q.reference.probabilities().size() == 2;
  if (q.reference.kind() == MeasureModel::Kind::Lebesgue)
    return q.sys.full_branch_uniform() && q.sys.branch_count() == 2;
  return false;
}

// P(count >= t) with t real; the lattice tolerance keeps integer thresholds
// exact.
double tail_at_least(long long n, double p, double t) {
  return binomial_tail(n, p, (long long)std::ceil(t - kLatticeTol));
}

double binary_iid_exact(const DeviationQuery& q, int n) {
  double u0 = (*q.iid_values)[0], u1 = (*q.iid_values)[1];
  double p = binary_success_probability(q);
  // count of symbol 1 = a; psi_n = n u0 + a (u1 - u0)
  double d = u1 - u0;
  auto measure_ge = [&](double c) {  // P(psi_n / n >= c)
    double rhs = double(n) * (c - u0);
    if (d > 0) return tail_at_least(n, p, rhs / d);
    if (d < 0) return 1.0 - tail_at_least(n, p, std::floor(rhs / d + kLatticeTol) + 1.0);
    return double(n) * u0 >= rhs - kLatticeTol ? 1.0 : 0.0;
  };
  auto measure_gt = [&](double c) {  // P(psi_n / n > c)
    double rhs = double(n) * (c - u0);
    if (d > 0) return binomial_tail(n, p, (long long)std::floor(rhs / d + kLatticeTol) + 1);
    if (d < 0) return 1.0 - tail_at_least(n, p, rhs / d);
    return double(n) * u0 > rhs + kLatticeTol ? 1.0 : 0.0;
  };
  switch (q.mode) {
    case ThresholdMode::AtLeast:
      return measure_ge(q.threshold);
    case ThresholdMode::GreaterThan:
      return measure_gt(q.threshold);
    case ThresholdMode::AbsGap:
      return measure_gt(*q.center + q.threshold - kLatticeTol) +
             (1.0 - measure_ge(*q.center - q.threshold + kLatticeTol));
  }
  return 0.0;
}

}  // namespace

void DeviationQuery::validate() const {
  if (schedule.empty()) throw std::invalid_argument("deviation query: empty n schedule");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (schedule[i] < 1) throw std::invalid_argument("deviation query: n >= 1 required");
    if (i > 0 && schedule[i] <= schedule[i - 1])
      throw std::invalid_argument("deviation query: schedule must be strictly increasing");
  }
  if (mode == ThresholdMode::AbsGap) {
    if (!center) throw std::invalid_argument("deviation query: abs_gap needs a center value");
    if (center_provenance.empty())
      throw std::invalid_argument("deviation query: abs_gap center needs a provenance tag");
  }
  if (iid_values && int(iid_values->size()) != sys.branch_count())
    throw std::invalid_argument("deviation query: iid_values size must match the alphabet");
}

MeasurePoint deviation_measure(const DeviationQuery& q, int n, DeviationEngine engine,
                               long long samples, std::uint64_t seed, long long budget) {
  q.validate();
  if (n < 1) throw std::invalid_argument("deviation_measure: n >= 1");
  MeasurePoint pt;
  pt.n = n;

  if (q.iid_values) audit_iid_reduction(q, std::min(n, 24), seed);

  if (engine == DeviationEngine::ExactCombinatorial) {
    pt.tag = "exact";
    if (binary_iid_exact_available(q)) {
      pt.measure = std::clamp(binary_iid_exact(q, n), 0.0, 1.0);
    } else {
      if (!q.reference.has_cylinder_mass(q.sys))
        throw std::domain_error("deviation_measure: reference has no exact cylinder masses");
      double words = std::pow(double(q.sys.branch_count()), double(n));
      if (words > double(budget)) throw BudgetError(budget);
      double drift = drift_of(q.observable, n);
      KahanSum total;
      for_each_word(q.sys, n, [&](const std::vector<int>& w) {
        double lm = q.reference.log_cylinder_mass(q.sys, w);
        if (lm == kNegInf) return;
        double avg = (q.observable(q.sys, cylinder_representative(q.sys, w), n) - drift) / n;
        if (event_holds(q, avg)) total.add(std::exp(lm));
      });
      pt.measure = std::clamp(total.value(), 0.0, 1.0);
    }
    pt.ci_low = pt.ci_high = pt.measure;
    return pt;
  }

  if (samples < 1) throw std::invalid_argument("deviation_measure: monte_carlo needs samples");
  pt.tag = "mc";
  auto rng = make_rng(seed, std::uint64_t(n));
  double drift = drift_of(q.observable, n);
  long long hits = 0;
  for (long long i = 0; i < samples; ++i) {
    Point x = q.reference.sample(q.sys, rng, n + 1);
    double avg;
    if (q.iid_values) {
      auto w = symbolic_word(q.sys, x, n);
      KahanSum s;
      for (int c : w) s.add((*q.iid_values)[std::size_t(c)]);
      avg = s.value() / n;
    } else {
      avg = (q.observable(q.sys, x, n) - drift) / n;
    }
    if (event_holds(q, avg)) ++hits;
  }
  pt.measure = double(hits) / double(samples);
  auto ci = wilson_interval(hits, samples);
  pt.ci_low = ci.low;
  pt.ci_high = ci.high;
  if (hits == 0) {
    pt.rate_unbounded_below = true;
    pt.ci_low = 0.0;
  }
  return pt;
}

RateFit empirical_rate(const std::vector<MeasurePoint>& series, double kappa) {
  std::vector<double> xs, ys;
  for (const auto& pt : series) {
    if (pt.measure <= 0.0) continue;
    xs.push_back(double(pt.n));
    ys.push_back(std::log(pt.measure) + kappa * std::log(double(pt.n)));
  }
  if (xs.size() < 4) throw RateFitError("empirical_rate: need >= 4 positive measure points");
  LinearFit f = least_squares(xs, ys);
  RateFit fit;
  fit.rate = -f.slope;
  fit.kappa = kappa;
  fit.intercept = f.intercept;
  fit.max_residual = f.max_residual;
  fit.points_used = int(xs.size());
  return fit;
}

namespace {

RateBound bound_with_margin(const DeviationQuery& q, const PotentialSequence& phi_gibbs,
                            double pressure, const MeasureFamily& family,
                            const std::vector<int>& kingman_n, int grid, double margin) {
  auto objective = [&](const MeasureModel& m, const std::vector<double>&) {
    auto h = m.entropy();
    if (!h) throw std::domain_error("rate bound: family member without closed-form entropy");
    auto f = kingman_functional(q.sys, phi_gibbs, m, kingman_n, KingmanMode::CylinderExact);
    return -pressure + *h + f.value;
  };
  auto slack = [&](const MeasureModel& m, const std::vector<double>&) {
    auto f = kingman_functional(q.sys, q.observable, m, kingman_n, KingmanMode::CylinderExact);
    double fstar = f.value - 0.0;  // drift is o(n): it does not move F_*
    if (q.mode == ThresholdMode::AbsGap)
      return std::abs(fstar - *q.center) - (q.threshold + margin);
    return fstar - (q.threshold + margin);
  };
  FamilyOptimum opt = maximize_over_family(family, objective, slack, grid);
  RateBound b;
  b.margin = margin;
  if (!opt.feasible_found) {
    b.minus_infinity = true;
    b.value = kNegInf;
    return b;
  }
  b.value = opt.value;
  b.argmax = opt.argmax;
  return b;
}

}  // namespace

RateBound rate_upper_bound(const DeviationQuery& q, const PotentialSequence& phi_gibbs,
                           double pressure, const MeasureFamily& family,
                           const std::vector<int>& kingman_n, int grid) {
  q.validate();
  return bound_with_margin(q, phi_gibbs, pressure, family, kingman_n, grid, 0.0);
}

RateBound rate_lower_bound(const DeviationQuery& q, const PotentialSequence& phi_gibbs,
                           double pressure, const MeasureFamily& family,
                           const std::vector<int>& kingman_n, int grid) {
  q.validate();
  RateBound best;
  best.minus_infinity = true;
  best.value = kNegInf;
  for (double margin : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5}) {
    RateBound b = bound_with_margin(q, phi_gibbs, pressure, family, kingman_n, grid, margin);
    if (!b.minus_infinity && (best.minus_infinity || b.value > best.value)) best = b;
  }
  return best;
}

DeviationReport ldp_sandwich(const DeviationQuery& q, const PotentialSequence& phi_gibbs,
                             double pressure, const MeasureFamily& family, DeviationEngine engine,
                             long long samples, std::uint64_t seed, double tol,
                             const std::vector<int>& kingman_n) {
  q.validate();
  DeviationReport rep;
  try {
    for (int n : q.schedule)
      rep.series.push_back(deviation_measure(q, n, engine, samples, derive_seed(seed, 1)));
  } catch (const std::exception&) {
    rep.failed_stage = "deviation_measure";
    return rep;
  }
  try {
    double kappa = engine == DeviationEngine::ExactCombinatorial ? 0.5 : 0.0;
    rep.fit = empirical_rate(rep.series, kappa);
  } catch (const std::exception&) {
    rep.failed_stage = "empirical_rate";
    return rep;
  }
  try {
    rep.upper = rate_upper_bound(q, phi_gibbs, pressure, family, kingman_n);
    rep.lower = rate_lower_bound(q, phi_gibbs, pressure, family, kingman_n);
  } catch (const std::exception&) {
    rep.failed_stage = "rate_bounds";
    return rep;
  }
  double minus_rate = -rep.fit.rate;
  double lo = rep.lower.minus_infinity ? kNegInf : rep.lower.value;
  double hi = rep.upper.minus_infinity ? kNegInf : rep.upper.value;
  double excess = std::max(lo - tol - minus_rate, minus_rate - (hi + tol));
  if (excess <= 0.0) {
    rep.verdict = DeviationReport::Verdict::Consistent;
  } else {
    rep.verdict = DeviationReport::Verdict::Violated;
    rep.violation_margin = excess;
  }
  return rep;
}

BallMassRate ball_mass_rate(const DynamicalSystem& sys, const MistakeFunction& g,
                            const MeasureModel& m, const MeasureModel& nu, double eps,
                            const std::vector<int>& n_list, int sample_count,
                            std::uint64_t seed) {
  if (n_list.size() < 2) throw std::invalid_argument("ball_mass_rate: need >= 2 depths");
  BallMassRate out;
  out.eps = eps;
  int max_n = *std::max_element(n_list.begin(), n_list.end());
  auto rng = make_rng(seed);
  for (int s = 0; s < sample_count; ++s) {
    Point x = nu.sample(sys, rng, max_n + 1);
    std::vector<double> xs, ys;
    for (int n : n_list) {
      auto w = symbolic_word(sys, x, n);
      double lm = m.log_mistake_mass(sys, w, g(n, eps));
      if (lm == kNegInf) continue;
      out.rows.push_back({std::size_t(s), n, -lm / n});
      xs.push_back(double(n));
      ys.push_back(-lm);
    }
    if (xs.size() < 2) continue;
    double rate = least_squares(xs, ys).slope;
    out.per_sample_rates.push_back(rate);
    out.ess_sup = std::max(out.ess_sup, rate);
  }
  return out;
}

}  // namespace natf
