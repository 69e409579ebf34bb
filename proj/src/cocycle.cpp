#include "natf/cocycle.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "natf/measure.hpp"
#include "natf/util.hpp"

namespace natf {

void CocycleSpec::validate(int n_check) const {
  if (matrices.empty()) throw std::invalid_argument("cocycle: need at least one matrix");
  int d = dim();
  if (d < 1) throw std::invalid_argument("cocycle: dimension must be >= 1");
  for (const auto& m : matrices) {
    if (m.rows() != d || m.cols() != d)
      throw std::invalid_argument("cocycle: all matrices must be d x d");
    if (!m.allFinite()) throw std::invalid_argument("cocycle: non-finite matrix entry");
  }
  // standing assumption: some length-n product is nonzero
  for (int n = 1; n <= n_check; ++n) {
    bool found = false;
    std::vector<int> word(std::size_t(n), 0);
    while (true) {
      if (log_word_norm(*this, word) != kNegInf) {
        found = true;
        break;
      }
      int i = n - 1;
      while (i >= 0 && word[std::size_t(i)] == symbol_count() - 1) word[std::size_t(i--)] = 0;
      if (i < 0) break;
      word[std::size_t(i)]++;
    }
    if (!found)
      throw std::invalid_argument("cocycle: all length-" + std::to_string(n) +
                                  " products vanish");
  }
}

Eigen::MatrixXd word_product(const CocycleSpec& c, std::span<const int> word) {
  if (word.empty()) throw std::invalid_argument("word_product: empty word");
  int l = c.symbol_count();
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(c.dim(), c.dim());
  for (int s : word) {
    if (s < 0 || s >= l) throw std::invalid_argument("word_product: symbol out of range");
    m = c.matrices[std::size_t(s)] * m;  // right-to-left: M_{i_n} ... M_{i_1}
  }
  return m;
}

std::vector<double> singular_values(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  std::vector<double> out(static_cast<std::size_t>(m.rows()));
  for (long i = 0; i < m.rows(); ++i) out[std::size_t(i)] = svd.singularValues()(i);
  return out;
}

double operator_norm(const Eigen::MatrixXd& m) {
  if (m.rows() == 1) return std::abs(m(0, 0));
  if (m.rows() == 2) {
    // closed form from eigenvalues of m^T m
    double a = m.col(0).squaredNorm(), b = m.col(1).squaredNorm();
    double csum = m.col(0).dot(m.col(1));
    double tr = a + b;
    double disc = std::sqrt(std::max(0.0, (a - b) * (a - b) + 4.0 * csum * csum));
    return std::sqrt(std::max(0.0, 0.5 * (tr + disc)));
  }
  return singular_values(m).front();
}

double log_word_norm(const CocycleSpec& c, std::span<const int> word) {
  if (word.empty()) throw std::invalid_argument("log_word_norm: empty word");
  Eigen::MatrixXd run = Eigen::MatrixXd::Identity(c.dim(), c.dim());
  double logscale = 0.0;
  int since = 0;
  for (int s : word) {
    if (s < 0 || s >= c.symbol_count())
      throw std::invalid_argument("log_word_norm: symbol out of range");
    run = c.matrices[std::size_t(s)] * run;
    if (++since >= 16 || run.cwiseAbs().maxCoeff() > 1e100 ||
        run.cwiseAbs().maxCoeff() < 1e-100) {
      double h = run.cwiseAbs().maxCoeff();
      if (h == 0.0) return kNegInf;
      run /= h;
      logscale += std::log(h);
      since = 0;
    }
  }
  double nm = operator_norm(run);
  if (nm == 0.0) return kNegInf;
  return logscale + std::log(nm);
}

PotentialSequence cocycle_potential(const CocycleSpec& c, double q) {
  if (!std::isfinite(q)) throw std::invalid_argument("cocycle_potential: q must be finite");
  PotentialSequence p;
  p.evaluator = [c, q](const DynamicalSystem& sys, const Point& x, int n) {
    if (q == 0.0) return 0.0;
    auto w = symbolic_word(sys, x, n);
    return q * log_word_norm(c, w);  // -inf tags a vanished product
  };
  p.declared_class = q >= 0.0 ? PotentialClass::SubAdditive : PotentialClass::AsymptoticallyAdditive;
  p.name = "cocycle_norm";
  return p;
}

PotentialSequence singular_value_potential(const CocycleSpec& c, int k, double q) {
  if (k < 1 || k > c.dim()) throw std::invalid_argument("singular_value_potential: bad index");
  PotentialSequence p;
  p.evaluator = [c, k, q](const DynamicalSystem& sys, const Point& x, int n) {
    auto w = symbolic_word(sys, x, n);
    Eigen::MatrixXd m = word_product(c, w);
    double s = singular_values(m)[std::size_t(k - 1)];
    return s > 0 ? q * std::log(s) : kNegInf;
  };
  p.declared_class = PotentialClass::SubAdditive;
  p.name = "singular_value";
  return p;
}

namespace {

// DFS over words with a stack of renormalized prefix products; visits every
// word of length <= n_max once, reusing length n-1 prefixes.
template <typename Visit>
void enumerate_products(const CocycleSpec& c, int n_max, Visit&& visit) {
  struct Level {
    Eigen::MatrixXd run;
    double logscale;
    int next_symbol;
  };
  int l = c.symbol_count();
  std::vector<Level> stack;
  stack.push_back({Eigen::MatrixXd::Identity(c.dim(), c.dim()), 0.0, 0});
  std::vector<int> word;
  while (!stack.empty()) {
    Level& top = stack.back();
    if (top.next_symbol >= l || int(word.size()) >= n_max) {
      stack.pop_back();
      if (!word.empty()) word.pop_back();
      continue;
    }
    int s = top.next_symbol++;
    Eigen::MatrixXd run = c.matrices[std::size_t(s)] * top.run;
    double logscale = top.logscale;
    double h = run.cwiseAbs().maxCoeff();
    if (h > 0.0) {
      run /= h;
      logscale += std::log(h);
    }
    word.push_back(s);
    bool zero = h == 0.0;
    double lognorm = zero ? kNegInf : logscale + std::log(operator_norm(run));
    visit(int(word.size()), lognorm);
    if (!zero && int(word.size()) < n_max) {
      stack.push_back({std::move(run), logscale, 0});
    } else if (zero && int(word.size()) < n_max) {
      // extensions of a zero product stay zero: report them without descending
      long long width = 1;
      for (int depth = int(word.size()) + 1; depth <= n_max; ++depth) {
        width *= l;
        for (long long k = 0; k < width; ++k) visit(depth, kNegInf);
      }
      word.pop_back();
    } else {
      word.pop_back();
    }
  }
}

}  // namespace

std::vector<PressureCurvePoint> cocycle_pressure(const CocycleSpec& c, double q, int n_max,
                                                 long long budget) {
  if (n_max < 1) throw std::invalid_argument("cocycle_pressure: n_max >= 1");
  int l = c.symbol_count();
  int d = c.dim();
  double words = std::pow(double(l), double(n_max));
  std::vector<double> p_values;

  if (words > double(budget)) {
    if (d != 1) throw BudgetError(budget);
    // scalar cocycles: partition sums factor exactly, P_n(q) = log sum |m_i|^q
    LogSumExp acc;
    for (const auto& m : c.matrices) {
      double a = std::abs(m(0, 0));
      acc.add(q == 0.0 ? 0.0 : q * std::log(a));
    }
    double v = acc.value();
    p_values.assign(std::size_t(n_max), v);
  } else {
    std::vector<LogSumExp> per_n(static_cast<std::size_t>(n_max));
    enumerate_products(c, n_max, [&](int depth, double lognorm) {
      double term;
      if (q == 0.0)
        term = 0.0;  // ||M||^0 counts every word
      else if (lognorm == kNegInf)
        term = q > 0 ? kNegInf : kPosInf;
      else
        term = q * lognorm;
      if (term == kPosInf)
        throw std::domain_error("cocycle_pressure: zero product with negative q");
      per_n[std::size_t(depth - 1)].add(term);
    });
    p_values.resize(std::size_t(n_max));
    for (int n = 1; n <= n_max; ++n) p_values[std::size_t(n - 1)] = per_n[std::size_t(n - 1)].value() / n;
  }

  std::vector<PressureCurvePoint> out;
  auto extr = aitken_extrapolate(p_values);
  for (int n = 1; n <= n_max; ++n) {
    PressureCurvePoint pt;
    pt.q = q;
    pt.n = n;
    pt.value = p_values[std::size_t(n - 1)];
    if (n == n_max) pt.extrapolated = extr;
    out.push_back(pt);
  }
  return out;
}

LyapunovEstimate lyapunov_cylinder_exact(const CocycleSpec& c, const MeasureModel& mu, int n,
                                         long long budget) {
  if (n < 1) throw std::invalid_argument("lyapunov: n >= 1");
  int l = c.symbol_count();
  if (std::pow(double(l), double(n)) > double(budget)) throw BudgetError(budget);
  DynamicalSystem shift = DynamicalSystem::full_shift(l);
  LyapunovEstimate est;
  est.n = n;
  KahanSum acc;
  std::vector<int> word(std::size_t(n), 0);
  while (true) {
    double lm = mu.log_cylinder_mass(shift, word);
    if (lm != kNegInf) {
      double ln = log_word_norm(c, word);
      if (ln == kNegInf)
        est.skipped_words++;  // zero product inside a positive-mass cylinder
      else
        acc.add(std::exp(lm) * ln);
    }
    int i = n - 1;
    while (i >= 0 && word[std::size_t(i)] == l - 1) word[std::size_t(i--)] = 0;
    if (i < 0) break;
    word[std::size_t(i)]++;
  }
  est.value = acc.value() / n;
  return est;
}

LyapunovEstimate lyapunov_monte_carlo(const CocycleSpec& c, const MeasureModel& mu,
                                      long long samples, int n, std::uint64_t seed) {
  if (n < 1 || samples < 1) throw std::invalid_argument("lyapunov_monte_carlo: bad arguments");
  auto rng = make_rng(seed);
  KahanSum sum, sumsq;
  long long used = 0;
  LyapunovEstimate est;
  est.n = n;
  for (long long i = 0; i < samples; ++i) {
    auto w = mu.sample_word(rng, n);
    double ln = log_word_norm(c, w);
    if (ln == kNegInf) {
      est.skipped_words++;
      continue;
    }
    double v = ln / n;
    sum.add(v);
    sumsq.add(v * v);
    ++used;
  }
  if (used == 0) throw std::domain_error("lyapunov_monte_carlo: all sampled products vanished");
  est.value = sum.value() / double(used);
  double var = std::max(0.0, sumsq.value() / double(used) - est.value * est.value);
  est.std_error = std::sqrt(var / double(used));
  return est;
}

namespace {

bool subspace_invariant(const CocycleSpec& c, const Eigen::MatrixXcd& basis, double tol) {
  // columns orthonormal; invariant iff (I - B B*) M B ~ 0 for every M
  Eigen::MatrixXcd b = basis;
  for (const auto& m : c.matrices) {
    Eigen::MatrixXcd img = m.cast<std::complex<double>>() * b;
    Eigen::MatrixXcd resid = img - b * (b.adjoint() * img);
    double scale = std::max(1.0, img.norm());
    if (resid.norm() > tol * scale) return false;
  }
  return true;
}

Eigen::MatrixXcd orthonormalize(const Eigen::MatrixXcd& v) {
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(v);
  Eigen::MatrixXcd q = qr.householderQ();
  return q.leftCols(v.cols());
}

}  // namespace

IrreducibilityResult irreducible(const CocycleSpec& c, int trials, double tol) {
  IrreducibilityResult res;
  int d = c.dim();
  if (d == 1) {
    res.verdict = IrreducibilityVerdict::Irreducible;  // C^1 has no proper subspace
    return res;
  }
  if (d <= 3) {
    // candidates: eigen-lines of each matrix, and invariant hyperplanes from
    // transpose eigenvectors (d = 3); a common invariant subspace must appear
    // among them whenever some matrix has distinct eigenvalues
    bool degenerate_pivots = true;
    for (const auto& m : c.matrices) {
      Eigen::EigenSolver<Eigen::MatrixXd> es(m);
      auto vals = es.eigenvalues();
      bool distinct = true;
      for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
          if (std::abs(vals(i) - vals(j)) <= tol * (1.0 + std::abs(vals(i)))) distinct = false;
      if (distinct) degenerate_pivots = false;
      for (int i = 0; i < d; ++i) {
        Eigen::MatrixXcd line = es.eigenvectors().col(i);
        line /= line.norm();
        if (subspace_invariant(c, line, tol)) {
          res.verdict = IrreducibilityVerdict::CommonInvariantSubspace;
          res.basis = line;
          return res;
        }
      }
      if (d == 3) {
        Eigen::EigenSolver<Eigen::MatrixXd> est(m.transpose());
        for (int i = 0; i < d; ++i) {
          // hyperplane orthogonal to a transpose eigenvector
          Eigen::Vector3cd w = est.eigenvectors().col(i);
          Eigen::MatrixXcd full(3, 3);
          full.col(0) = w;
          full.col(1) = Eigen::Vector3cd::Unit(w.cwiseAbs()(0) < 0.9 ? 0 : 1);
          full.col(2) = Eigen::Vector3cd::Unit(2);
          Eigen::MatrixXcd q = orthonormalize(full);
          Eigen::MatrixXcd plane = q.rightCols(2);
          if (subspace_invariant(c, plane, tol)) {
            res.verdict = IrreducibilityVerdict::CommonInvariantSubspace;
            res.basis = plane;
            return res;
          }
        }
      }
    }
    if (!degenerate_pivots) {
      res.verdict = IrreducibilityVerdict::Irreducible;
      return res;
    }
    // fall through to the randomized span test when every spectrum is degenerate
  }
  // randomized Burnside-style span test
  auto rng = make_rng(0xBEEF, std::uint64_t(trials));
  std::normal_distribution<double> gauss;
  for (int t = 0; t < std::max(1, trials); ++t) {
    Eigen::VectorXd v(d);
    for (int i = 0; i < d; ++i) v(i) = gauss(rng);
    Eigen::MatrixXd span(d, 1);
    span.col(0) = v / v.norm();
    bool grew = true;
    while (grew && span.cols() < d) {
      grew = false;
      Eigen::MatrixXd candidates(d, span.cols() * c.symbol_count());
      for (int s = 0; s < c.symbol_count(); ++s)
        candidates.middleCols(long(s) * span.cols(), span.cols()) =
            c.matrices[std::size_t(s)] * span;
      for (long j = 0; j < candidates.cols(); ++j) {
        Eigen::VectorXd r = candidates.col(j) - span * (span.transpose() * candidates.col(j));
        if (r.norm() > tol * std::max(1.0, candidates.col(j).norm())) {
          span.conservativeResize(Eigen::NoChange, span.cols() + 1);
          span.col(span.cols() - 1) = r / r.norm();
          grew = true;
        }
      }
    }
    if (span.cols() < d) {
      Eigen::MatrixXcd basis = span.cast<std::complex<double>>();
      if (subspace_invariant(c, basis, std::sqrt(tol))) {
        res.verdict = IrreducibilityVerdict::CommonInvariantSubspace;
        res.basis = basis;
        return res;
      }
      res.verdict = IrreducibilityVerdict::Inconclusive;
      return res;
    }
  }
  res.verdict = d <= 3 ? IrreducibilityVerdict::Inconclusive : IrreducibilityVerdict::Irreducible;
  return res;
}

}  // namespace natf
