#ifndef NATF_THERMO_HPP
#define NATF_THERMO_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "natf/measure.hpp"
#include "natf/potential.hpp"
#include "natf/system.hpp"

namespace natf {

enum class BoundDirection { Exact, UpperBound, TwoSided };

/// Kingman functional F_*(mu, Phi) = inf_n (1/n) int phi_n dmu, evaluated on a
/// finite n schedule. Sub-additive inputs are tagged as one-sided bounds: the
/// inf at finite n only bounds F_* from above.
struct KingmanEstimate {
  double value = 0.0;
  BoundDirection direction = BoundDirection::TwoSided;
  int argmin_n = 0;
  std::vector<std::pair<int, double>> per_n;  // (n, (1/n) int phi_n dmu)
  std::vector<double> std_errors;             // parallel; zero for exact rows
  bool invariance_warning = false;
};

enum class KingmanMode { CylinderExact, MonteCarlo };

KingmanEstimate kingman_functional(const DynamicalSystem& sys, const PotentialSequence& phi,
                                   const MeasureModel& mu, const std::vector<int>& n_list,
                                   KingmanMode mode, long long samples = 4096,
                                   std::uint64_t seed = 1, long long budget = (1LL << 22));

struct PressureEstimate {
  std::string method;        // "cylinder" | "separated"
  std::string z_definition;  // what Z_n sums and where phi_n is evaluated
  std::vector<std::pair<int, double>> per_n;  // (n, (1/n) log Z_n)
  double value = 0.0;                         // extrapolated / headline estimate
  bool monotone = false;                      // per_n nonincreasing
  double eps = 0.0, grid_resolution = 0.0;    // separated method only
  double refined_value = 0.0;                 // run at grid_resolution / 2
  double drift = 0.0;                         // relative drift between the two runs
  bool unconverged = false;                   // drift > 5%
};

/// P_n = (1/n) log sum over admissible n-words of e^{phi_n(rep)}; rep is the
/// periodic word representative on shifts and the left cylinder endpoint on
/// interval maps.
PressureEstimate cylinder_pressure(const DynamicalSystem& sys, const PotentialSequence& phi,
                                   int n_max, long long budget = (1LL << 22));

/// Greedy maximal (n, eps)-separated subset of a uniform grid, visited in
/// decreasing phi_n order; refined once at grid_resolution / 2.
PressureEstimate separated_pressure(const DynamicalSystem& sys, const PotentialSequence& phi,
                                    int n, double eps, double grid_resolution);

/// Parametrized measure family over the probability simplex (k weights summing
/// to 1). `feasible` restricts the parameter domain; empty means unrestricted.
struct MeasureFamily {
  std::string name;
  int weight_count = 0;
  std::function<MeasureModel(const std::vector<double>&)> make;
  std::function<bool(const std::vector<double>&)> feasible;
};

MeasureFamily bernoulli_family(int symbols);
MeasureFamily restricted_bernoulli_family(int symbols,
                                          std::function<bool(const std::vector<double>&)> cut,
                                          std::string name);

struct FamilyOptimum {
  double value = 0.0;
  std::vector<double> argmax;
  bool feasible_found = false;
};

/// max objective(p) over the simplex subject to family.feasible and an
/// optional extra constraint; simplex grid seed + Nelder-Mead polish in
/// softmax coordinates with a linear penalty on the constraint.
FamilyOptimum maximize_over_family(
    const MeasureFamily& family,
    const std::function<double(const MeasureModel&, const std::vector<double>&)>& objective,
    const std::function<double(const MeasureModel&, const std::vector<double>&)>& constraint_slack,
    int grid = 48, int polish_iterations = 400);

struct VariationalGapReport {
  double pressure = 0.0;
  double best_value = 0.0;  // sup over the family of h_mu + F_*(mu, Phi)
  double gap = 0.0;         // pressure - best_value
  std::vector<double> argmax;
  bool satisfied = false;  // gap >= -1e-6 (variational inequality direction)
};

VariationalGapReport variational_gap(const DynamicalSystem& sys, const PotentialSequence& phi,
                                     const MeasureFamily& family, double pressure,
                                     const std::vector<int>& n_list, int grid = 48);

struct GibbsReport {
  enum class Verdict { Gibbs, WeakGibbs, Violated };
  struct Row {
    int n = 0;
    double K_n = 1.0;
    double log_K_over_n = 0.0;
  };
  std::vector<Row> rows;
  double sup_K = 1.0;
  double slope = 0.0;  // least-squares slope of (1/n) log K_n against n
  Verdict verdict = Verdict::Violated;
  double gibbs_threshold = 0.0;  // K used for the gibbs(K) verdict
  long long excluded = 0;        // zero-mass samples (audited, not scored)
  int sample_count = 0;
  double eps = 0.0;

  // class inclusion: gibbs(K) is a special case of weak Gibbs
  bool satisfies_weak_gibbs() const { return verdict != Verdict::Violated; }
};

/// Checks K_n^{-1} <= nu(B_n(x, eps)) / e^{-nP + phi_n(x)} <= K_n over sampled
/// x; balls are modeled at per-symbol cylinder resolution.
GibbsReport weak_gibbs_check(const DynamicalSystem& sys, const PotentialSequence& phi,
                             const MeasureModel& nu, double pressure, int sample_count,
                             const std::vector<int>& n_list, double eps, std::uint64_t seed,
                             double gibbs_threshold = 100.0);

}  // namespace natf

#endif
