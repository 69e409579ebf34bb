#include "natf/system.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace natf {

Point Point::interval(double x) {
  if (!(x >= 0.0 && x < 1.0)) throw std::domain_error("interval point outside [0,1)");
  Point p;
  p.kind_ = Kind::Interval;
  p.x_ = x;
  return p;
}

Point Point::shift(std::vector<int> word, std::size_t tail_period) {
  if (word.empty()) throw std::invalid_argument("shift point needs a nonempty word");
  if (tail_period == 0) tail_period = word.size();
  if (tail_period > word.size())
    throw std::invalid_argument("tail_period exceeds word length");
  Point p;
  p.kind_ = Kind::Shift;
  p.word_ = std::move(word);
  p.tail_period_ = tail_period;
  return p;
}

double Point::coordinate() const {
  if (kind_ != Kind::Interval) throw std::domain_error("not an interval point");
  return x_;
}

int Point::symbol(std::size_t j) const {
  if (kind_ != Kind::Shift) throw std::domain_error("not a shift point");
  if (j < word_.size()) return word_[j];
  std::size_t base = word_.size() - tail_period_;
  return word_[base + (j - word_.size()) % tail_period_];
}

bool Point::operator==(const Point& other) const {
  if (kind_ != other.kind_) return false;
  if (kind_ == Kind::Interval) return x_ == other.x_;
  // eventually periodic sequences: equal iff they agree on a long enough prefix
  std::size_t pre = std::max(word_.size(), other.word_.size());
  std::size_t period = std::lcm(tail_period_, other.tail_period_);
  for (std::size_t j = 0; j < pre + period; ++j)
    if (symbol(j) != other.symbol(j)) return false;
  return true;
}

IndexSet IndexSet::full(int n) {
  IndexSet s;
  s.horizon = n;
  s.indices.resize(std::size_t(std::max(n, 0)));
  for (int i = 0; i < n; ++i) s.indices[std::size_t(i)] = i;
  return s;
}

IndexSet IndexSet::of(std::vector<int> idx, int horizon) {
  IndexSet s;
  s.indices = std::move(idx);
  s.horizon = horizon;
  std::sort(s.indices.begin(), s.indices.end());
  s.validate();
  return s;
}

void IndexSet::validate() const {
  if (indices.empty()) throw std::invalid_argument("IndexSet must be nonempty");
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 0 || indices[i] >= horizon)
      throw std::invalid_argument("IndexSet index out of [0, horizon)");
    if (i > 0 && indices[i] == indices[i - 1])
      throw std::invalid_argument("IndexSet indices must be distinct");
  }
}

namespace {

double mod1(double y) {
  double r = y - std::floor(y);
  if (r >= 1.0) r = 0.0;  // guards against floating round-up
  return r;
}

// Branch cut c of the Manneville-Pomeau map: c + c^{1+alpha} = 1.
double solve_mp_cut(double alpha) {
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid + std::pow(mid, 1.0 + alpha) < 1.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

DynamicalSystem DynamicalSystem::doubling() {
  DynamicalSystem s;
  s.kind_ = Kind::Doubling;
  s.beta_ = 2.0;
  s.symbols_ = 2;
  s.name_ = "doubling";
  s.spec_class_ = SpecificationClass::Specification;
  return s;
}

DynamicalSystem DynamicalSystem::beta_map(double beta) {
  if (!(beta > 1.0)) throw std::invalid_argument("beta map requires beta > 1");
  DynamicalSystem s;
  s.kind_ = Kind::Beta;
  s.beta_ = beta;
  s.symbols_ = int(std::ceil(beta));
  s.name_ = "beta";
  // beta maps satisfy almost specification for every unbounded mistake function
  s.spec_class_ = SpecificationClass::AlmostSpecification;
  return s;
}

DynamicalSystem DynamicalSystem::manneville_pomeau(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("Manneville-Pomeau requires alpha in (0,1)");
  DynamicalSystem s;
  s.kind_ = Kind::MannevillePomeau;
  s.alpha_ = alpha;
  s.mp_cut_ = solve_mp_cut(alpha);
  s.symbols_ = 2;
  s.name_ = "manneville_pomeau";
  s.spec_class_ = SpecificationClass::Specification;
  return s;
}

DynamicalSystem DynamicalSystem::full_shift(int symbols) {
  if (symbols < 1) throw std::invalid_argument("full shift requires >= 1 symbol");
  DynamicalSystem s;
  s.kind_ = Kind::FullShift;
  s.symbols_ = symbols;
  s.name_ = "full_shift";
  s.spec_class_ = SpecificationClass::Specification;
  return s;
}

DynamicalSystem DynamicalSystem::sft(int symbols, std::vector<int> transition_row_major) {
  if (symbols < 1) throw std::invalid_argument("sft requires >= 1 symbol");
  if (transition_row_major.size() != std::size_t(symbols) * std::size_t(symbols))
    throw std::invalid_argument("sft transition matrix must be symbols x symbols");
  for (int v : transition_row_major)
    if (v != 0 && v != 1) throw std::invalid_argument("sft transition entries must be 0/1");
  DynamicalSystem s;
  s.kind_ = Kind::Sft;
  s.symbols_ = symbols;
  s.transition_ = std::move(transition_row_major);
  s.name_ = "sft";
  s.spec_class_ = SpecificationClass::Unknown;
  return s;
}

bool DynamicalSystem::is_interval() const {
  return kind_ == Kind::Doubling || kind_ == Kind::Beta || kind_ == Kind::MannevillePomeau;
}

bool DynamicalSystem::transition_allowed(int a, int b) const {
  if (kind_ != Kind::Sft) return true;
  return transition_[std::size_t(a) * std::size_t(symbols_) + std::size_t(b)] != 0;
}

int DynamicalSystem::branch_count() const { return symbols_; }

std::vector<double> DynamicalSystem::branch_cuts() const {
  std::vector<double> cuts;
  switch (kind_) {
    case Kind::Doubling:
      cuts.push_back(0.5);
      break;
    case Kind::Beta:
      for (int k = 1; k < symbols_; ++k) cuts.push_back(double(k) / beta_);
      break;
    case Kind::MannevillePomeau:
      cuts.push_back(mp_cut_);
      break;
    default:
      throw std::domain_error("branch_cuts: not an interval map");
  }
  return cuts;
}

int DynamicalSystem::branch_of(double x) const {
  switch (kind_) {
    case Kind::Doubling:
      return x < 0.5 ? 0 : 1;
    case Kind::Beta: {
      int b = int(std::floor(beta_ * x));
      return std::min(b, symbols_ - 1);
    }
    case Kind::MannevillePomeau:
      return x < mp_cut_ ? 0 : 1;
    default:
      throw std::domain_error("branch_of: not an interval map");
  }
}

bool DynamicalSystem::full_branch_uniform() const {
  if (kind_ == Kind::Doubling) return true;
  if (kind_ == Kind::Beta) return beta_ == std::floor(beta_);
  return false;
}

void DynamicalSystem::validate_point(const Point& p) const {
  if (is_interval()) {
    if (p.kind() != Point::Kind::Interval)
      throw std::domain_error("interval system expects interval points");
    double x = p.coordinate();
    if (!(x >= 0.0 && x < 1.0)) throw std::domain_error("point outside [0,1)");
  } else {
    if (p.kind() != Point::Kind::Shift)
      throw std::domain_error("shift system expects shift points");
    std::size_t horizon = p.word().size() + p.tail_period();
    for (std::size_t j = 0; j < horizon; ++j) {
      int s = p.symbol(j);
      if (s < 0 || s >= symbols_) throw std::domain_error("symbol out of range");
    }
    if (kind_ == Kind::Sft) {
      for (std::size_t j = 0; j + 1 < horizon + 1; ++j)
        if (!transition_allowed(p.symbol(j), p.symbol(j + 1)))
          throw std::domain_error("forbidden transition in sft point");
    }
  }
}

Point DynamicalSystem::apply(const Point& p) const {
  validate_point(p);
  if (is_interval()) {
    double x = p.coordinate();
    double y;
    switch (kind_) {
      case Kind::Doubling:
        y = 2.0 * x;
        break;
      case Kind::Beta:
        y = beta_ * x;
        break;
      case Kind::MannevillePomeau:
        y = x + std::pow(x, 1.0 + alpha_);
        break;
      default:
        y = x;
    }
    return Point::interval(mod1(y));
  }
  // shift: drop the first coordinate, keeping the word length stable
  std::vector<int> w(p.word().size());
  for (std::size_t j = 0; j < w.size(); ++j) w[j] = p.symbol(j + 1);
  return Point::shift(std::move(w), p.tail_period());
}

double DynamicalSystem::metric(const Point& a, const Point& b) const {
  if (is_interval()) return std::abs(a.coordinate() - b.coordinate());
  std::size_t pre = std::max(a.word().size(), b.word().size());
  std::size_t period = std::lcm(a.tail_period(), b.tail_period());
  std::size_t horizon = pre + period;
  for (std::size_t j = 0; j < horizon; ++j)
    if (a.symbol(j) != b.symbol(j)) return std::pow(2.0, -double(j));
  return 0.0;
}

std::vector<Point> iterate(const DynamicalSystem& sys, const Point& x, int n) {
  if (n < 0) throw std::invalid_argument("iterate: n must be >= 0");
  std::vector<Point> orbit;
  orbit.reserve(std::size_t(n) + 1);
  orbit.push_back(x);
  sys.validate_point(x);
  for (int k = 0; k < n; ++k) orbit.push_back(sys.apply(orbit.back()));
  return orbit;
}

double bowen_distance(const DynamicalSystem& sys, const Point& x, const Point& y, int n) {
  if (n < 1) throw std::invalid_argument("bowen_distance: n must be >= 1");
  double best = 0.0;
  Point a = x, b = y;
  for (int i = 0; i < n; ++i) {
    best = std::max(best, sys.metric(a, b));
    if (i + 1 < n) {
      a = sys.apply(a);
      b = sys.apply(b);
    }
  }
  return best;
}

double restricted_distance(const DynamicalSystem& sys, const Point& x, const Point& y,
                           const IndexSet& lambda) {
  lambda.validate();
  double best = 0.0;
  Point a = x, b = y;
  int pos = 0;
  for (int idx : lambda.indices) {
    while (pos < idx) {
      a = sys.apply(a);
      b = sys.apply(b);
      ++pos;
    }
    best = std::max(best, sys.metric(a, b));
  }
  return best;
}

std::vector<int> symbolic_word(const DynamicalSystem& sys, const Point& x, int n) {
  if (n < 0) throw std::invalid_argument("symbolic_word: n must be >= 0");
  std::vector<int> w;
  w.reserve(std::size_t(n));
  if (sys.is_shift()) {
    for (int j = 0; j < n; ++j) w.push_back(x.symbol(std::size_t(j)));
    return w;
  }
  Point p = x;
  for (int j = 0; j < n; ++j) {
    w.push_back(sys.branch_of(p.coordinate()));
    p = sys.apply(p);
  }
  return w;
}

}  // namespace natf
