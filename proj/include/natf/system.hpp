#ifndef NATF_SYSTEM_HPP
#define NATF_SYSTEM_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace natf {

/// A point of the phase space: either an interval coordinate in [0,1) or an
/// eventually periodic symbol sequence (finite word, tail repeats the last
/// `tail_period` symbols).
class Point {
 public:
  enum class Kind { Interval, Shift };

  static Point interval(double x);
  static Point shift(std::vector<int> word, std::size_t tail_period = 0);

  Kind kind() const { return kind_; }
  double coordinate() const;
  int symbol(std::size_t j) const;
  const std::vector<int>& word() const { return word_; }
  std::size_t tail_period() const { return tail_period_; }

  bool operator==(const Point& other) const;

 private:
  Kind kind_ = Kind::Interval;
  double x_ = 0.0;
  std::vector<int> word_;
  std::size_t tail_period_ = 0;
};

/// Index subset of [0, horizon-1] used for restricted Bowen distances.
struct IndexSet {
  std::vector<int> indices;  // sorted, distinct
  int horizon = 0;

  static IndexSet full(int n);
  static IndexSet of(std::vector<int> idx, int horizon);
  void validate() const;
};

enum class SpecificationClass { Specification, AlmostSpecification, Unknown };

/// Concrete dynamical system: interval maps (doubling, beta, Manneville-Pomeau)
/// and symbolic shifts (full shift, SFT). Interval metric is |x-y| on [0,1);
/// shift metric is 2^{-min{j : x_j != y_j}}.
class DynamicalSystem {
 public:
  enum class Kind { Doubling, Beta, MannevillePomeau, FullShift, Sft };

  static DynamicalSystem doubling();
  static DynamicalSystem beta_map(double beta);
  static DynamicalSystem manneville_pomeau(double alpha);
  static DynamicalSystem full_shift(int symbols);
  static DynamicalSystem sft(int symbols, std::vector<int> transition_row_major);

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  SpecificationClass specification_class() const { return spec_class_; }
  bool is_interval() const;
  bool is_shift() const { return !is_interval(); }
  double beta() const { return beta_; }
  double alpha() const { return alpha_; }
  int symbols() const { return symbols_; }
  const std::vector<int>& transition() const { return transition_; }
  bool transition_allowed(int a, int b) const;

  /// Number of monotone branches for interval maps (symbol alphabet size for
  /// the symbolic coding); equals `symbols()` for shifts.
  int branch_count() const;
  /// Branch cut locations for interval maps (increasing, excluding 0 and 1).
  std::vector<double> branch_cuts() const;
  /// Symbolic digit of an interval point (branch index at the current step).
  int branch_of(double x) const;
  /// True when branch cylinders of depth n all have width branch_count^-n
  /// (doubling and integer beta maps), so ell-adic coding is exact.
  bool full_branch_uniform() const;

  void validate_point(const Point& p) const;
  Point apply(const Point& p) const;
  double metric(const Point& a, const Point& b) const;

 private:
  Kind kind_ = Kind::Doubling;
  double beta_ = 2.0;
  double alpha_ = 0.0;
  double mp_cut_ = 0.0;  // branch cut of the Manneville-Pomeau map
  int symbols_ = 2;
  std::vector<int> transition_;
  std::string name_;
  SpecificationClass spec_class_ = SpecificationClass::Unknown;
};

std::vector<Point> iterate(const DynamicalSystem& sys, const Point& x, int n);
double bowen_distance(const DynamicalSystem& sys, const Point& x, const Point& y, int n);
double restricted_distance(const DynamicalSystem& sys, const Point& x, const Point& y,
                           const IndexSet& lambda);

/// First n symbolic digits of a point (branch indices for interval maps,
/// coordinates for shift points).
std::vector<int> symbolic_word(const DynamicalSystem& sys, const Point& x, int n);

}  // namespace natf

#endif
