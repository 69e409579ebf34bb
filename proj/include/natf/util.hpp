#ifndef NATF_UTIL_HPP
#define NATF_UTIL_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

namespace natf {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

// Streaming log(sum(exp(l_i))) with running-max rescaling.
class LogSumExp {
 public:
  void add(double l) {
    if (l == kNegInf) return;
    if (l <= max_) {
      sum_ += std::exp(l - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - l) + 1.0;
      max_ = l;
    }
    count_++;
  }
  double value() const {
    if (count_ == 0) return kNegInf;
    return max_ + std::log(sum_);
  }
  std::size_t count() const { return count_; }

 private:
  double max_ = kNegInf;
  double sum_ = 0.0;
  std::size_t count_ = 0;
};

class KahanSum {
 public:
  void add(double x) {
    double y = x - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0, c_ = 0.0;
};

inline double log_choose(long long n, long long k) {
  if (k < 0 || k > n) return kNegInf;
  return std::lgamma(double(n) + 1.0) - std::lgamma(double(k) + 1.0) -
         std::lgamma(double(n - k) + 1.0);
}

// Exact binomial tail P(Bin(n,p) >= kmin), long double accumulation.
inline double binomial_tail(long long n, double p, long long kmin) {
  if (kmin <= 0) return 1.0;
  if (kmin > n) return 0.0;
  long double total = 0.0L;
  long double lp = std::log((long double)p);
  long double lq = std::log1p(-(long double)p);
  for (long long k = kmin; k <= n; ++k) {
    long double lt = (long double)log_choose(n, k) + k * lp + (n - k) * lq;
    total += expl(lt);
  }
  return (double)std::min(total, 1.0L);
}

struct WilsonInterval {
  double low = 0.0, high = 1.0;
};

inline WilsonInterval wilson_interval(long long hits, long long n, double z = 2.5758293) {
  // default z: 99% two-sided
  if (n <= 0) return {0.0, 1.0};
  double phat = double(hits) / double(n);
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (phat + z2 / (2.0 * n)) / denom;
  double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;
};

inline LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("least_squares: need >= 2 points");
  double n = double(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double denom = n * sxx - sx * sx;
  if (denom == 0) throw std::invalid_argument("least_squares: degenerate abscissae");
  LinearFit f;
  f.slope = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / n;
  for (std::size_t i = 0; i < x.size(); ++i)
    f.max_residual = std::max(f.max_residual, std::abs(y[i] - f.slope * x[i] - f.intercept));
  return f;
}

// Deterministic per-task seed derivation (splitmix64 over the pair).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t task) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (task + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t task = 0) {
  return std::mt19937_64(derive_seed(seed, task));
}

// Aitken delta-squared acceleration of the last three sequence values.
inline std::optional<double> aitken_extrapolate(const std::vector<double>& v) {
  if (v.size() < 3) return std::nullopt;
  double p1 = v[v.size() - 3], p2 = v[v.size() - 2], p3 = v[v.size() - 1];
  double d1 = p2 - p1, d2 = p3 - p2;
  if (d1 == 0.0 || d2 == 0.0) return p3;
  if ((d1 > 0) != (d2 > 0)) return std::nullopt;  // non-monotone: no extrapolation
  double denom = d2 - d1;
  if (std::abs(denom) < 1e-300) return p3;
  return p3 - d2 * d2 / denom;
}

}  // namespace natf

#endif
