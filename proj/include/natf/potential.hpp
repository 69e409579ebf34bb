#ifndef NATF_POTENTIAL_HPP
#define NATF_POTENTIAL_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "natf/system.hpp"

namespace natf {

enum class PotentialClass { Additive, SubAdditive, AlmostAdditive, AsymptoticallyAdditive };

/// Potential sequence Phi = {phi_n}. The evaluator returns phi_n(x); class
/// tags are declarations checked empirically by classify_sample, never proofs.
struct PotentialSequence {
  using Evaluator = std::function<double(const DynamicalSystem&, const Point&, int)>;
  struct Approximant {
    double xi = 0.0;
    std::function<double(const Point&)> phi;
  };

  Evaluator evaluator;
  PotentialClass declared_class = PotentialClass::Additive;
  double almost_additive_constant = 0.0;
  std::vector<Approximant> approximants;
  std::function<double(int)> bowen_bound;  // optional a_n rule
  std::string name;

  double operator()(const DynamicalSystem& sys, const Point& x, int n) const;
};

double birkhoff_sum(const DynamicalSystem& sys, const std::function<double(const Point&)>& phi,
                    const Point& x, int n);

PotentialSequence zero_potential();
/// phi_n = n * a (e.g. a = -log 2 for the doubling Gibbs role).
PotentialSequence constant_potential(double a);
PotentialSequence birkhoff_potential(std::function<double(const Point&)> phi, std::string name);
/// Birkhoff sum of the indicator of the given symbolic digit along the orbit.
PotentialSequence digit_frequency_potential(int digit);
/// Adds a sequence drift a_n to an existing potential (asymptotically additive
/// perturbations phi_n + a_n).
PotentialSequence perturbed_potential(PotentialSequence base, std::function<double(int)> a_n,
                                      std::string name);

enum class Verdict { Consistent, Violated, NotCheckable };

struct DefectWitness {
  Point x = Point::interval(0.0);
  int m = 0, n = 0;
  double defect = 0.0;
};

struct ClassificationReport {
  double max_subadditive_defect = 0.0;   // max of phi_{m+n} - phi_m - phi_n o f^m
  double min_superadditive_defect = 0.0; // min of the same defect
  double estimated_c = 0.0;              // max |defect|
  struct AsymptoticDefect {
    double xi = 0.0;
    std::vector<std::pair<int, double>> gap_per_n;  // (n, |phi_n - S_n phi_xi| / n)
  };
  std::vector<AsymptoticDefect> asymptotic_defects;
  Verdict additive = Verdict::NotCheckable;
  Verdict sub_additive = Verdict::NotCheckable;
  Verdict almost_additive = Verdict::NotCheckable;
  Verdict asymptotically_additive = Verdict::NotCheckable;
  std::optional<DefectWitness> witness;
  double tolerance_abs = 1e-9, tolerance_rel = 1e-9;
};

ClassificationReport classify_sample(const PotentialSequence& phi, const DynamicalSystem& sys,
                                     const std::vector<Point>& sample_points, int m_max,
                                     int n_max, double tol_abs = 1e-9, double tol_rel = 1e-9);

struct InsufficientProbesError : std::runtime_error {
  explicit InsufficientProbesError(int attempted_)
      : std::runtime_error("no probe found inside the Bowen ball"), attempted(attempted_) {}
  int attempted;
};

/// Lower estimate of gamma_n(Phi, eps) = sup |phi_n(y) - phi_n(z)| over the
/// Bowen ball B_n(x, eps), from sampled probes.
double variation(const PotentialSequence& phi, const DynamicalSystem& sys, const Point& x,
                 int n, double eps, int probe_count, std::uint64_t seed = 1);

struct VariationProfile {
  std::vector<std::pair<int, double>> estimates;  // (n, gamma_n estimate)
  double slope_per_n = 0.0;                       // LS slope of estimate/n against n
};

VariationProfile variation_profile(const PotentialSequence& phi, const DynamicalSystem& sys,
                                   const Point& x, const std::vector<int>& n_list, double eps,
                                   int probe_count, std::uint64_t seed = 1);

/// Probes inside B_n(x, eps); exact cylinder agreement on shifts, inverse-branch
/// interval shrinking (bisection) on interval maps. Every returned probe is
/// verified by bowen_distance < eps.
std::vector<Point> bowen_ball_probes(const DynamicalSystem& sys, const Point& x, int n,
                                     double eps, int probe_count, std::uint64_t seed);

}  // namespace natf

#endif
