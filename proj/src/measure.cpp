#include "natf/measure.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "natf/util.hpp"

namespace natf {

namespace {
constexpr double kParryTruncation = 1e-14;
}

MeasureModel MeasureModel::bernoulli(std::vector<double> p) {
  if (p.empty()) throw std::invalid_argument("bernoulli: empty probability vector");
  double sum = 0.0;
  for (double v : p) {
    if (v < 0.0) throw std::invalid_argument("bernoulli: negative probability");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("bernoulli: probabilities must sum to 1 (within 1e-12)");
  MeasureModel m;
  m.kind_ = Kind::Bernoulli;
  m.name_ = "bernoulli";
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log(v);
  m.entropy_ = h;
  m.p_ = std::move(p);
  return m;
}

MeasureModel MeasureModel::markov(std::vector<std::vector<double>> rows,
                                  std::optional<std::vector<double>> stationary) {
  std::size_t l = rows.size();
  if (l == 0) throw std::invalid_argument("markov: empty matrix");
  for (const auto& r : rows) {
    if (r.size() != l) throw std::invalid_argument("markov: matrix must be square");
    double s = 0.0;
    for (double v : r) {
      if (v < 0.0) throw std::invalid_argument("markov: negative entry");
      s += v;
    }
    if (std::abs(s - 1.0) > 1e-12) throw std::invalid_argument("markov: rows must sum to 1");
  }
  std::vector<double> pi;
  if (stationary) {
    pi = *stationary;
    if (pi.size() != l) throw std::invalid_argument("markov: stationary vector size mismatch");
    for (std::size_t j = 0; j < l; ++j) {
      double v = 0.0;
      for (std::size_t i = 0; i < l; ++i) v += pi[i] * rows[i][j];
      if (std::abs(v - pi[j]) > 1e-10)
        throw std::invalid_argument("markov: stationary vector fails pi P = pi");
    }
  } else {
    // solve pi P = pi, sum(pi) = 1
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(long(l) + 1, long(l));
    for (std::size_t j = 0; j < l; ++j)
      for (std::size_t i = 0; i < l; ++i)
        a(long(j), long(i)) = rows[i][j] - (i == j ? 1.0 : 0.0);
    for (std::size_t i = 0; i < l; ++i) a(long(l), long(i)) = 1.0;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(long(l) + 1);
    b(long(l)) = 1.0;
    Eigen::VectorXd x = a.colPivHouseholderQr().solve(b);
    pi.resize(l);
    for (std::size_t i = 0; i < l; ++i) pi[i] = std::max(0.0, x(long(i)));
  }
  MeasureModel m;
  m.kind_ = Kind::Markov;
  m.name_ = "markov";
  double h = 0.0;
  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t j = 0; j < l; ++j)
      if (rows[i][j] > 0.0) h -= pi[i] * rows[i][j] * std::log(rows[i][j]);
  m.entropy_ = h;
  m.p_.assign(pi.begin(), pi.end());
  m.rows_ = std::move(rows);
  m.pi_ = std::move(pi);
  return m;
}

MeasureModel MeasureModel::lebesgue() {
  MeasureModel m;
  m.kind_ = Kind::Lebesgue;
  m.name_ = "lebesgue";
  return m;
}

MeasureModel MeasureModel::parry_beta(double beta) {
  if (!(beta > 1.0)) throw std::invalid_argument("parry_beta: beta > 1 required");
  MeasureModel m;
  m.kind_ = Kind::ParryBeta;
  m.name_ = "parry";
  m.beta_ = beta;
  m.entropy_ = std::log(beta);
  m.build_parry();
  return m;
}

MeasureModel MeasureModel::empirical_orbit(std::uint64_t seed, int burn_in) {
  MeasureModel m;
  m.kind_ = Kind::EmpiricalOrbit;
  m.name_ = "empirical_orbit";
  m.orbit_seed_ = seed;
  m.burn_in_ = burn_in;
  m.invariant_ = false;
  m.ergodic_ = false;
  return m;
}

MeasureModel MeasureModel::gibbs_cylinder(std::function<double(double)> phi, int n_max,
                                          int grid_size) {
  if (n_max < 1 || grid_size < 16)
    throw std::invalid_argument("gibbs_cylinder: need n_max >= 1 and grid >= 16");
  MeasureModel m;
  m.kind_ = Kind::GibbsCylinder;
  m.name_ = "gibbs_cylinder";
  m.gibbs_phi_ = std::move(phi);
  m.gibbs_n_max_ = n_max;
  m.gibbs_grid_ = grid_size;
  m.build_gibbs();
  return m;
}

void MeasureModel::build_parry() {
  // orbit of 1 under T_beta with geometric weights, truncated at 1e-14
  std::vector<double> orbit;
  double t = 1.0, w = 1.0, norm = 0.0;
  std::vector<std::pair<double, double>> tw;  // (t_j, beta^-j)
  while (w >= kParryTruncation) {
    tw.emplace_back(t, w);
    norm += w * t;
    t = beta_ * t;
    t -= std::floor(t);
    w /= beta_;
  }
  std::vector<double> breaks{0.0, 1.0};
  for (auto& [tj, wj] : tw)
    if (tj > 0.0 && tj < 1.0) breaks.push_back(tj);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  parry_breaks_ = breaks;
  parry_density_vals_.clear();
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    double hi = breaks[k + 1];
    double v = 0.0;
    for (auto& [tj, wj] : tw)
      if (tj >= hi) v += wj;
    parry_density_vals_.push_back(v / norm);
  }
  parry_cdf_.assign(breaks.size(), 0.0);
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k)
    parry_cdf_[k + 1] =
        parry_cdf_[k] + parry_density_vals_[k] * (breaks[k + 1] - breaks[k]);
  // normalize residual truncation error
  double total = parry_cdf_.back();
  for (auto& c : parry_cdf_) c /= total;
  for (auto& v : parry_density_vals_) v /= total;
}

double MeasureModel::parry_density(double x) const {
  if (kind_ != Kind::ParryBeta) throw std::domain_error("parry_density: not a Parry measure");
  auto it = std::upper_bound(parry_breaks_.begin(), parry_breaks_.end(), x);
  std::size_t k = std::size_t(std::max<std::ptrdiff_t>(0, it - parry_breaks_.begin() - 1));
  if (k >= parry_density_vals_.size()) k = parry_density_vals_.size() - 1;
  return parry_density_vals_[k];
}

double MeasureModel::parry_interval_mass(double a, double b) const {
  if (kind_ != Kind::ParryBeta) throw std::domain_error("not a Parry measure");
  a = std::clamp(a, 0.0, 1.0);
  b = std::clamp(b, 0.0, 1.0);
  if (b <= a) return 0.0;
  double mass = 0.0;
  for (std::size_t k = 0; k + 1 < parry_breaks_.size(); ++k) {
    double lo = std::max(a, parry_breaks_[k]);
    double hi = std::min(b, parry_breaks_[k + 1]);
    if (hi > lo) mass += parry_density_vals_[k] * (hi - lo);
  }
  return mass;
}

void MeasureModel::build_gibbs() {
  int g = gibbs_grid_;
  gibbs_log_h_.assign(std::size_t(gibbs_n_max_) + 1, std::vector<double>(std::size_t(g) + 1, 0.0));
  gibbs_log_z_.assign(std::size_t(gibbs_n_max_) + 1, 0.0);
  for (int m = 1; m <= gibbs_n_max_; ++m) {
    auto& prev = gibbs_log_h_[std::size_t(m - 1)];
    auto& cur = gibbs_log_h_[std::size_t(m)];
    auto prev_at = [&](double u) {
      double t = u * g;
      int i = std::min(int(t), g - 1);
      double fr = t - i;
      return prev[std::size_t(i)] * (1.0 - fr) + prev[std::size_t(i) + 1] * fr;
    };
    for (int i = 0; i <= g; ++i) {
      double y = double(i) / g;
      double u0 = y / 2.0, u1 = (y + 1.0) / 2.0;
      LogSumExp acc;
      acc.add(gibbs_phi_(u0) + prev_at(u0));
      acc.add(gibbs_phi_(u1) + prev_at(u1));
      cur[std::size_t(i)] = acc.value();
    }
    gibbs_log_z_[std::size_t(m)] = cur[0];
  }
}

double MeasureModel::gibbs_log_h_at(int m, double y) const {
  const auto& h = gibbs_log_h_[std::size_t(m)];
  double t = y * gibbs_grid_;
  int i = std::min(int(t), gibbs_grid_ - 1);
  double fr = t - i;
  return h[std::size_t(i)] * (1.0 - fr) + h[std::size_t(i) + 1] * fr;
}

double MeasureModel::gibbs_log_partition(int n) const {
  if (kind_ != Kind::GibbsCylinder) throw std::domain_error("not a Gibbs cylinder measure");
  if (n < 0 || n > gibbs_n_max_) throw std::invalid_argument("gibbs_log_partition: n out of range");
  return gibbs_log_z_[std::size_t(n)];
}

double MeasureModel::gibbs_pressure() const {
  if (kind_ != Kind::GibbsCylinder) throw std::domain_error("not a Gibbs cylinder measure");
  return gibbs_log_z_[std::size_t(gibbs_n_max_)] - gibbs_log_z_[std::size_t(gibbs_n_max_) - 1];
}

Point MeasureModel::sample(const DynamicalSystem& sys, std::mt19937_64& rng, int horizon) const {
  if (horizon < 1) throw std::invalid_argument("sample: horizon >= 1 required");
  switch (kind_) {
    case Kind::Bernoulli:
    case Kind::Markov: {
      auto w = sample_word(rng, horizon);
      if (sys.is_shift()) return Point::shift(std::move(w));
      if (!sys.full_branch_uniform())
        throw std::domain_error("symbolic sampling needs a full-branch uniform interval map");
      double x = 0.0, scale = 1.0;
      int l = sys.branch_count();
      for (int s : w) {
        scale /= l;
        x += s * scale;
      }
      return Point::interval(x);
    }
    case Kind::Lebesgue: {
      if (!sys.is_interval()) throw std::domain_error("Lebesgue sampling needs an interval map");
      std::uniform_real_distribution<double> u(0.0, 1.0);
      return Point::interval(u(rng));
    }
    case Kind::ParryBeta: {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      double c = u(rng);
      auto it = std::upper_bound(parry_cdf_.begin(), parry_cdf_.end(), c);
      std::size_t k = std::size_t(std::max<std::ptrdiff_t>(0, it - parry_cdf_.begin() - 1));
      if (k + 1 >= parry_breaks_.size()) k = parry_breaks_.size() - 2;
      double lo = parry_breaks_[k], hi = parry_breaks_[k + 1];
      double dv = parry_density_vals_[k];
      double x = dv > 0 ? lo + (c - parry_cdf_[k]) / dv : lo;
      return Point::interval(std::clamp(x, 0.0, std::nextafter(1.0, 0.0)));
    }
    case Kind::EmpiricalOrbit: {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      Point p = sys.is_interval()
                    ? Point::interval(u(rng))
                    : [&] {
                        std::uniform_int_distribution<int> sym(0, sys.symbols() - 1);
                        std::vector<int> w(std::size_t(horizon) + std::size_t(burn_in_));
                        for (auto& s : w) s = sym(rng);
                        return Point::shift(std::move(w));
                      }();
      for (int i = 0; i < burn_in_; ++i) p = sys.apply(p);
      return p;
    }
    case Kind::GibbsCylinder: {
      if (sys.kind() != DynamicalSystem::Kind::Doubling)
        throw std::domain_error("gibbs_cylinder measure is defined over the doubling map");
      auto w = sample_word(rng, horizon);
      double x = 0.0;
      for (std::size_t i = w.size(); i-- > 0;) x = (w[i] + x) / 2.0;
      return Point::interval(x);
    }
  }
  throw std::logic_error("unreachable");
}

std::vector<int> MeasureModel::sample_word(std::mt19937_64& rng, int n) const {
  std::vector<int> w(static_cast<std::size_t>(n));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  switch (kind_) {
    case Kind::Bernoulli: {
      for (auto& s : w) {
        double c = u(rng), acc = 0.0;
        int pick = int(p_.size()) - 1;
        for (std::size_t i = 0; i < p_.size(); ++i) {
          acc += p_[i];
          if (c < acc) {
            pick = int(i);
            break;
          }
        }
        s = pick;
      }
      return w;
    }
    case Kind::Markov: {
      int cur = -1;
      for (auto& s : w) {
        const std::vector<double>& dist = cur < 0 ? pi_ : rows_[std::size_t(cur)];
        double c = u(rng), acc = 0.0;
        int pick = int(dist.size()) - 1;
        for (std::size_t i = 0; i < dist.size(); ++i) {
          acc += dist[i];
          if (c < acc) {
            pick = int(i);
            break;
          }
        }
        s = pick;
        cur = pick;
      }
      return w;
    }
    case Kind::GibbsCylinder: {
      if (n > gibbs_n_max_) throw std::invalid_argument("gibbs sample depth exceeds n_max");
      double cur = 0.0;
      for (int step = 1; step <= n; ++step) {
        double l0 = gibbs_phi_(cur / 2.0) + gibbs_log_h_at(n - step, cur / 2.0);
        double l1 = gibbs_phi_((cur + 1.0) / 2.0) + gibbs_log_h_at(n - step, (cur + 1.0) / 2.0);
        double m = std::max(l0, l1);
        double p0 = std::exp(l0 - m) / (std::exp(l0 - m) + std::exp(l1 - m));
        int b = u(rng) < p0 ? 0 : 1;
        w[std::size_t(n - step)] = b;
        cur = (b + cur) / 2.0;
      }
      return w;
    }
    default:
      throw std::domain_error("sample_word: measure has no symbolic sampler");
  }
}

bool MeasureModel::has_cylinder_mass(const DynamicalSystem& sys) const {
  switch (kind_) {
    case Kind::Bernoulli:
    case Kind::Markov:
      return sys.is_shift() || sys.full_branch_uniform();
    case Kind::Lebesgue:
      return sys.is_interval() && sys.kind() != DynamicalSystem::Kind::MannevillePomeau;
    case Kind::ParryBeta:
      return sys.kind() == DynamicalSystem::Kind::Beta ||
             sys.kind() == DynamicalSystem::Kind::Doubling;
    case Kind::GibbsCylinder:
      return sys.kind() == DynamicalSystem::Kind::Doubling;
    default:
      return false;
  }
}

std::pair<double, double> MeasureModel::beta_cylinder_interval(const DynamicalSystem& sys,
                                                               std::span<const int> word) {
  if (!sys.is_interval()) throw std::domain_error("beta_cylinder_interval: interval maps only");
  double beta = sys.beta();
  if (sys.kind() == DynamicalSystem::Kind::Doubling) beta = 2.0;
  if (sys.kind() == DynamicalSystem::Kind::MannevillePomeau)
    throw std::domain_error("beta_cylinder_interval: affine branches required");
  double lo = 0.0, hi = 1.0;
  for (std::size_t i = word.size(); i-- > 0;) {
    int d = word[i];
    double blo = d / beta;
    double bhi = std::min((d + 1) / beta, 1.0);
    lo = (lo + d) / beta;
    hi = (hi + d) / beta;
    lo = std::max(lo, blo);
    hi = std::min(hi, bhi);
    if (hi <= lo) return {lo, lo};
  }
  return {lo, hi};
}

double MeasureModel::log_cylinder_mass(const DynamicalSystem& sys,
                                       std::span<const int> word) const {
  if (word.empty()) return 0.0;
  switch (kind_) {
    case Kind::Bernoulli: {
      double s = 0.0;
      for (int c : word) {
        if (c < 0 || c >= int(p_.size())) throw std::invalid_argument("symbol out of range");
        if (p_[std::size_t(c)] == 0.0) return kNegInf;
        s += std::log(p_[std::size_t(c)]);
      }
      return s;
    }
    case Kind::Markov: {
      double s = pi_[std::size_t(word[0])] > 0 ? std::log(pi_[std::size_t(word[0])]) : kNegInf;
      for (std::size_t i = 0; i + 1 < word.size(); ++i) {
        double t = rows_[std::size_t(word[i])][std::size_t(word[i + 1])];
        if (t == 0.0) return kNegInf;
        s += std::log(t);
      }
      return s;
    }
    case Kind::Lebesgue: {
      if (sys.full_branch_uniform())
        return -double(word.size()) * std::log(double(sys.branch_count()));
      auto [a, b] = beta_cylinder_interval(sys, word);
      return b > a ? std::log(b - a) : kNegInf;
    }
    case Kind::ParryBeta: {
      auto [a, b] = beta_cylinder_interval(sys, word);
      double m = parry_interval_mass(a, b);
      return m > 0 ? std::log(m) : kNegInf;
    }
    case Kind::GibbsCylinder: {
      int m = int(word.size());
      if (m > gibbs_n_max_) throw std::invalid_argument("cylinder depth exceeds gibbs n_max");
      double v = 0.0;
      KahanSum s;
      for (std::size_t i = word.size(); i-- > 0;) {
        v = (word[i] + v) / 2.0;
        s.add(gibbs_phi_(v));
      }
      return s.value() - gibbs_log_z_[std::size_t(m)];
    }
    default:
      throw std::domain_error("cylinder mass not defined for this measure");
  }
}

double MeasureModel::cylinder_mass(const DynamicalSystem& sys, std::span<const int> word) const {
  return std::exp(log_cylinder_mass(sys, word));
}

double MeasureModel::log_mistake_mass(const DynamicalSystem& sys, std::span<const int> word,
                                      long long g) const {
  long long n = (long long)word.size();
  if (g < 0) throw std::invalid_argument("log_mistake_mass: g >= 0 required");
  g = std::min(g, n);
  int l;
  std::vector<double> p;
  switch (kind_) {
    case Kind::Bernoulli:
      l = int(p_.size());
      p = p_;
      break;
    case Kind::Lebesgue:
      if (!sys.full_branch_uniform())
        throw std::domain_error("mistake mass: full-branch uniform system required");
      l = sys.branch_count();
      p.assign(std::size_t(l), 1.0 / l);
      break;
    case Kind::Markov: {
      // dp over (mistakes used, last symbol)
      l = int(pi_.size());
      std::vector<std::vector<double>> dp(std::size_t(g) + 1,
                                          std::vector<double>(std::size_t(l), 0.0));
      for (int s = 0; s < l; ++s) {
        long long j = s != word[0] ? 1 : 0;
        if (j <= g) dp[std::size_t(j)][std::size_t(s)] += pi_[std::size_t(s)];
      }
      for (std::size_t i = 1; i < word.size(); ++i) {
        std::vector<std::vector<double>> nx(std::size_t(g) + 1,
                                            std::vector<double>(std::size_t(l), 0.0));
        for (long long j = 0; j <= g; ++j)
          for (int s = 0; s < l; ++s) {
            double v = dp[std::size_t(j)][std::size_t(s)];
            if (v == 0.0) continue;
            for (int t = 0; t < l; ++t) {
              long long nj = j + (t != word[i] ? 1 : 0);
              if (nj > g) continue;
              nx[std::size_t(nj)][std::size_t(t)] += v * rows_[std::size_t(s)][std::size_t(t)];
            }
          }
        dp = std::move(nx);
      }
      double total = 0.0;
      for (long long j = 0; j <= g; ++j)
        for (int s = 0; s < l; ++s) total += dp[std::size_t(j)][std::size_t(s)];
      return total > 0 ? std::log(total) : kNegInf;
    }
    case Kind::GibbsCylinder: {
      int m = int(word.size());
      if (m > gibbs_n_max_) throw std::invalid_argument("depth exceeds gibbs n_max");
      // DFS right-to-left over flip choices with remaining budget, sharing
      // suffix Birkhoff sums across branches
      LogSumExp acc;
      std::function<void(int, double, double, long long)> rec = [&](int i, double v, double sum,
                                                                    long long budget) {
        if (i < 0) {
          acc.add(sum);
          return;
        }
        int b = word[std::size_t(i)];
        double v0 = (b + v) / 2.0;
        rec(i - 1, v0, sum + gibbs_phi_(v0), budget);
        if (budget > 0) {
          double v1 = ((1 - b) + v) / 2.0;
          rec(i - 1, v1, sum + gibbs_phi_(v1), budget - 1);
        }
      };
      rec(m - 1, 0.0, 0.0, g);
      return acc.value() - gibbs_log_z_[std::size_t(m)];
    }
    default:
      throw std::domain_error("mistake mass not defined for this measure");
  }
  // product-measure DP over (position, mistakes)
  std::vector<double> dp(std::size_t(g) + 1, 0.0);
  dp[0] = 1.0;
  for (long long i = 0; i < n; ++i) {
    int c = word[std::size_t(i)];
    if (c < 0 || c >= l) throw std::invalid_argument("symbol out of range");
    double match = p[std::size_t(c)];
    double mismatch = 1.0 - match;
    for (long long j = std::min(g, i + 1); j >= 0; --j) {
      double keep = dp[std::size_t(j)] * match;
      double flip = j > 0 ? dp[std::size_t(j) - 1] * mismatch : 0.0;
      dp[std::size_t(j)] = keep + flip;
    }
  }
  double total = 0.0;
  for (double v : dp) total += v;
  return total > 0 ? std::log(total) : kNegInf;
}

double MeasureModel::consistency_defect(const DynamicalSystem& sys, int depth,
                                        std::uint64_t seed) const {
  if (kind_ != Kind::GibbsCylinder) throw std::domain_error("consistency_defect: gibbs only");
  auto rng = make_rng(seed);
  double worst = 0.0;
  for (int rep = 0; rep < 64; ++rep) {
    auto w = sample_word(rng, depth);
    double parent = log_cylinder_mass(sys, w);
    LogSumExp kids;
    for (int b = 0; b < 2; ++b) {
      auto wc = w;
      wc.push_back(b);
      kids.add(log_cylinder_mass(sys, wc));
    }
    worst = std::max(worst, std::abs(kids.value() - parent));
  }
  return worst;
}

Point cylinder_representative(const DynamicalSystem& sys, const std::vector<int>& word) {
  if (word.empty()) throw std::invalid_argument("cylinder_representative: empty word");
  if (sys.is_shift()) {
    if (sys.kind() == DynamicalSystem::Kind::Sft &&
        !sys.transition_allowed(word.back(), word.front()))
      return Point::shift(word, 1);  // periodic closure disallowed: repeat the last symbol
    return Point::shift(word, word.size());
  }
  return Point::interval(MeasureModel::beta_cylinder_interval(sys, word).first);
}

void for_each_word(const DynamicalSystem& sys, int n,
                   const std::function<void(const std::vector<int>&)>& fn) {
  if (n < 1) throw std::invalid_argument("for_each_word: n >= 1");
  int l = sys.branch_count();
  std::vector<int> word(std::size_t(n), 0);
  std::function<void(int)> rec = [&](int depth) {
    if (depth == n) {
      fn(word);
      return;
    }
    for (int s = 0; s < l; ++s) {
      if (sys.kind() == DynamicalSystem::Kind::Sft && depth > 0 &&
          !sys.transition_allowed(word[std::size_t(depth - 1)], s))
        continue;
      word[std::size_t(depth)] = s;
      rec(depth + 1);
    }
  };
  rec(0);
}

}  // namespace natf
