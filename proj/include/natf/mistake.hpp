#ifndef NATF_MISTAKE_HPP
#define NATF_MISTAKE_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "natf/measure.hpp"
#include "natf/system.hpp"

namespace natf {

/// Mistake function g(n, eps): monotone in n, sublinear; for eps > eps0 the
/// value g(n, eps0) is used.
struct MistakeFunction {
  std::function<long long(long long, double)> rule;
  double eps0 = 1.0;
  std::string name;

  long long operator()(long long n, double eps) const {
    return rule(n, eps > eps0 ? eps0 : eps);
  }
};

MistakeFunction zero_mistakes();
MistakeFunction constant_mistakes(long long k);
MistakeFunction sqrt_mistakes(double scale = 1.0);
MistakeFunction log_mistakes(double scale = 1.0);

/// y in B_n(g; x, eps) iff #{i < n : d(f^i x, f^i y) < eps} >= n - g(n, eps).
bool mistake_ball_contains(const DynamicalSystem& sys, const MistakeFunction& g, const Point& x,
                           const Point& y, int n, double eps);

struct SeparationResult {
  bool separated = false;
  std::optional<std::pair<std::size_t, std::size_t>> violating_pair;
};

/// (g; n, eps)-separated: every pair has more than g(n, eps) indices with
/// d(f^i x, f^i y) > eps.
SeparationResult is_mistake_separated(const DynamicalSystem& sys, const MistakeFunction& g,
                                      const std::vector<Point>& points, int n, double eps);

struct SpanningResult {
  std::vector<std::size_t> centers;     // indices into the candidate list
  std::size_t separated_subset_size = 0;  // pairwise (g;n,eps)-separated among centers
};

/// Greedy (g; n, eps)-spanning subset of the candidates (max residual
/// coverage); membership test uses non-strict <= per the dual definition.
SpanningResult greedy_spanning(const DynamicalSystem& sys, const MistakeFunction& g,
                               const std::vector<Point>& candidates, int n, double eps);

struct CoveringEstimate {
  int n = 0;
  double eps = 0.0, delta = 0.0;
  long long count = 0;
  std::string method;
  double covered_fraction = 0.0;
  bool low_sample_warning = false;
  std::optional<double> entropy_slope;
};

/// Greedy upper bound on N(g; n, eps, delta): centers drawn from mu until the
/// covered sample fraction exceeds delta.
CoveringEstimate covering_number(const DynamicalSystem& sys, const MistakeFunction& g,
                                 const MeasureModel& mu, int n, double eps, double delta,
                                 long long samples, std::uint64_t seed);

/// Exact number of n-cylinders within Hamming distance <= g of a fixed word on
/// the full ell-shift: sum_{j<=g} C(n,j) (ell-1)^j. Exact as an integer up to
/// 2^53; computed in extended precision beyond that.
double mistake_ball_cylinder_count(int ell, long long n, long long g_value);
double log_mistake_ball_cylinder_count(int ell, long long n, long long g_value);

enum class EntropyMode { ExactCylinder, GreedySample };

struct EntropyEstimate {
  struct Row {
    double eps = 0.0;
    int n = 0;
    double ball_rate = 0.0;  // mean over samples of -(1/n) log mu(B_n(g;x,eps))
    std::optional<double> covering_slope;
  };
  std::vector<Row> rows;
  double lower_limit = 0.0, upper_limit = 0.0;
  std::optional<double> target;  // known h_mu(f) when available
  bool trend_decreasing = false;
};

/// Katok / mistake-Brin-Katok entropy estimators. ExactCylinder mode computes
/// ball masses at per-symbol cylinder resolution (exact on full shifts and
/// full-branch uniform interval maps); GreedySample adds sampled covering
/// slopes.
EntropyEstimate katok_entropy(const DynamicalSystem& sys, const MeasureModel& mu,
                              const MistakeFunction& g, const std::vector<double>& eps_grid,
                              const std::vector<int>& n_grid, double delta, EntropyMode mode,
                              long long samples = 256, std::uint64_t seed = 1);

}  // namespace natf

#endif
