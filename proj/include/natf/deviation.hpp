#ifndef NATF_DEVIATION_HPP
#define NATF_DEVIATION_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "natf/measure.hpp"
#include "natf/mistake.hpp"
#include "natf/potential.hpp"
#include "natf/system.hpp"
#include "natf/thermo.hpp"

namespace natf {

enum class ThresholdMode { AtLeast, GreaterThan, AbsGap };

/// Deviation experiment: m(U_n) with U_n = {x : (1/n) psi_n(x) [mode] c}.
/// AbsGap mode uses U_n = {x : |(1/n) psi_n(x) - center| >= c} and requires a
/// provenance tag for the center value.
struct DeviationQuery {
  DynamicalSystem sys = DynamicalSystem::doubling();
  PotentialSequence observable;  // psi (rate observable of the bounds)
  /// Per-symbol i.i.d. reduction: psi_n(x) = sum of values[w_i] over the first
  /// n symbolic digits (plus the observable's bowen_bound drift a_n, if set).
  /// Enables exact binomial tails and fast Monte Carlo; audited at run time.
  std::optional<std::vector<double>> iid_values;
  MeasureModel reference = MeasureModel::lebesgue();  // m
  double threshold = 0.0;                             // c
  ThresholdMode mode = ThresholdMode::AtLeast;
  std::optional<double> center;
  std::string center_provenance;
  std::vector<int> schedule;  // strictly increasing n values

  void validate() const;
};

enum class DeviationEngine { ExactCombinatorial, MonteCarlo };

struct MeasurePoint {
  int n = 0;
  double measure = 0.0;  // m-hat(U_n)
  std::string tag;       // "exact" | "mc"
  double ci_low = 0.0, ci_high = 1.0;
  bool rate_unbounded_below = false;  // MC saw zero hits
};

MeasurePoint deviation_measure(const DeviationQuery& q, int n, DeviationEngine engine,
                               long long samples = 0, std::uint64_t seed = 1,
                               long long budget = (1LL << 22));

struct RateFitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RateFit {
  double rate = 0.0;   // decay exponent I-hat; >= 0 means exponential decay
  double kappa = 0.0;  // log-n correction used (0 or 1/2)
  double intercept = 0.0;
  double max_residual = 0.0;
  int points_used = 0;
};

/// Least-squares fit of log m-hat = -I n - kappa log n + b over the positive
/// entries of the series; throws RateFitError below 4 usable points.
RateFit empirical_rate(const std::vector<MeasurePoint>& series, double kappa);

struct RateBound {
  double value = 0.0;  // bound on (1/n) log m(U_n); -inf when infeasible
  bool minus_infinity = false;
  std::vector<double> argmax;
  bool family_restricted = true;  // 'partial': sup taken over the family only
  double margin = 0.0;            // strict-constraint margin attaining the sup
};

/// sup{-P + h_eta + F_*(eta, Phi_gibbs)} over family members whose observable
/// Kingman value satisfies the query constraint (>= c; AbsGap: |F - center|
/// >= c).
RateBound rate_upper_bound(const DeviationQuery& q, const PotentialSequence& phi_gibbs,
                           double pressure, const MeasureFamily& family,
                           const std::vector<int>& kingman_n = {1, 2, 3, 4}, int grid = 48);

/// Same program under the strict constraint, realized as a margin schedule
/// {1e-1, ..., 1e-5} with the supremum over the schedule reported.
RateBound rate_lower_bound(const DeviationQuery& q, const PotentialSequence& phi_gibbs,
                           double pressure, const MeasureFamily& family,
                           const std::vector<int>& kingman_n = {1, 2, 3, 4}, int grid = 48);

struct DeviationReport {
  std::vector<MeasurePoint> series;
  RateFit fit;
  RateBound upper, lower;
  enum class Verdict { Consistent, Violated, Incomplete };
  Verdict verdict = Verdict::Incomplete;
  double violation_margin = 0.0;
  std::string failed_stage;
  // sign conventions, printed in every report
  std::string convention =
      "I-hat is a decay exponent (>= 0); bounds apply to (1/n) log m(U_n), so "
      "consistency means lower - tol <= -I-hat <= upper + tol";
};

DeviationReport ldp_sandwich(const DeviationQuery& q, const PotentialSequence& phi_gibbs,
                             double pressure, const MeasureFamily& family, DeviationEngine engine,
                             long long samples = 0, std::uint64_t seed = 1, double tol = 0.02,
                             const std::vector<int>& kingman_n = {1, 2, 3, 4});

struct BallMassRate {
  struct Row {
    std::size_t sample = 0;
    int n = 0;
    double value = 0.0;  // -(1/n) log m(B_n(g; x, eps))
  };
  std::vector<Row> rows;
  std::vector<double> per_sample_rates;  // LS slope of -log mass against n
  double ess_sup = 0.0;                  // max over sampled x
  double eps = 0.0;
};

/// h_m(g; f, nu) estimate: mistake-ball mass decay rates of m at nu-sampled
/// points, at per-symbol cylinder resolution.
BallMassRate ball_mass_rate(const DynamicalSystem& sys, const MistakeFunction& g,
                            const MeasureModel& m, const MeasureModel& nu, double eps,
                            const std::vector<int>& n_list, int sample_count,
                            std::uint64_t seed);

}  // namespace natf

#endif
