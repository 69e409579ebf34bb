#ifndef NATF_COCYCLE_HPP
#define NATF_COCYCLE_HPP

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <vector>

#include "natf/potential.hpp"
#include "natf/system.hpp"

namespace natf {

class MeasureModel;  // measure.hpp

/// Matrix cocycle over the full shift on ell symbols: one d x d matrix per
/// symbol, word products taken right-to-left (M_word = M_last ... M_first).
struct CocycleSpec {
  std::vector<Eigen::MatrixXd> matrices;

  int symbol_count() const { return int(matrices.size()); }
  int dim() const { return matrices.empty() ? 0 : int(matrices.front().rows()); }
  /// Checks shape/finiteness and that some length-n product is nonzero for
  /// n <= n_check.
  void validate(int n_check = 8) const;
};

Eigen::MatrixXd word_product(const CocycleSpec& c, std::span<const int> word);

std::vector<double> singular_values(const Eigen::MatrixXd& m);
double operator_norm(const Eigen::MatrixXd& m);

/// log ||M_word|| accumulated with periodic renormalization; -inf for a zero
/// product.
double log_word_norm(const CocycleSpec& c, std::span<const int> word);

PotentialSequence cocycle_potential(const CocycleSpec& c, double q);
/// Companion {q log sigma_k(M_word)} family (k is 1-based).
PotentialSequence singular_value_potential(const CocycleSpec& c, int k, double q);

struct PressureCurvePoint {
  double q = 0.0;
  int n = 0;
  double value = 0.0;  // (1/n) log sum over words of ||M_word||^q
  std::optional<double> extrapolated;
};

struct BudgetError : std::runtime_error {
  explicit BudgetError(long long limit_)
      : std::runtime_error("enumeration budget exceeded"), limit(limit_) {}
  long long limit;
};

std::vector<PressureCurvePoint> cocycle_pressure(const CocycleSpec& c, double q, int n_max,
                                                 long long budget = (1LL << 24));

struct LyapunovEstimate {
  double value = 0.0;
  double std_error = 0.0;  // 0 for the exact engine
  int n = 0;
  long long skipped_words = 0;  // zero-mass or zero-norm audit count
};

LyapunovEstimate lyapunov_cylinder_exact(const CocycleSpec& c, const MeasureModel& mu, int n,
                                         long long budget = (1LL << 24));
LyapunovEstimate lyapunov_monte_carlo(const CocycleSpec& c, const MeasureModel& mu,
                                      long long samples, int n, std::uint64_t seed);

enum class IrreducibilityVerdict { Irreducible, CommonInvariantSubspace, Inconclusive };

struct IrreducibilityResult {
  IrreducibilityVerdict verdict = IrreducibilityVerdict::Inconclusive;
  Eigen::MatrixXcd basis;  // columns span the common invariant subspace, when found
};

IrreducibilityResult irreducible(const CocycleSpec& c, int trials = 16, double tol = 1e-9);

}  // namespace natf

#endif
