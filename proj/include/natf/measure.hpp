#ifndef NATF_MEASURE_HPP
#define NATF_MEASURE_HPP

#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "natf/system.hpp"

namespace natf {

/// Reference / invariant measures with reproducible samplers, cylinder masses
/// where defined, and closed-form entropies where known.
///
/// Symbolic cylinder masses are at per-symbol resolution: the mass of the set
/// of points whose first |word| symbolic digits equal `word`. For interval
/// systems the digits are branch indices.
class MeasureModel {
 public:
  enum class Kind { Bernoulli, Markov, Lebesgue, ParryBeta, EmpiricalOrbit, GibbsCylinder };

  static MeasureModel bernoulli(std::vector<double> p);
  static MeasureModel markov(std::vector<std::vector<double>> rows,
                             std::optional<std::vector<double>> stationary = std::nullopt);
  static MeasureModel lebesgue();
  static MeasureModel parry_beta(double beta);
  static MeasureModel empirical_orbit(std::uint64_t seed, int burn_in = 64);
  /// Gibbs-type measure on the doubling map from normalized cylinder weights
  /// e^{S_n phi(left endpoint)} / Z_n; Z_n computed by a transfer-operator
  /// sweep on a uniform grid. Masses at different depths are separately
  /// normalized (approximation defect reported by consistency_defect()).
  static MeasureModel gibbs_cylinder(std::function<double(double)> phi, int n_max,
                                     int grid_size = 1 << 13);

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  bool invariant() const { return invariant_; }
  bool ergodic() const { return ergodic_; }
  std::optional<double> entropy() const { return entropy_; }
  int alphabet() const { return int(p_.size()); }
  const std::vector<double>& probabilities() const { return p_; }
  double beta() const { return beta_; }

  /// Draws a point; shift systems get words of length `horizon`, interval
  /// systems get coordinates. Reproducible per rng state.
  Point sample(const DynamicalSystem& sys, std::mt19937_64& rng, int horizon) const;
  /// Symbol word of length n drawn from a symbolic measure (fast path used by
  /// Monte Carlo sweeps).
  std::vector<int> sample_word(std::mt19937_64& rng, int n) const;

  bool has_cylinder_mass(const DynamicalSystem& sys) const;
  double log_cylinder_mass(const DynamicalSystem& sys, std::span<const int> word) const;
  double cylinder_mass(const DynamicalSystem& sys, std::span<const int> word) const;

  /// log-mass of the union of cylinders within Hamming distance <= g of
  /// `word` (symbolic mistake ball at per-symbol resolution). Defined for
  /// product/Markov masses on full alphabets and for GibbsCylinder.
  double log_mistake_mass(const DynamicalSystem& sys, std::span<const int> word,
                          long long g) const;

  /// Interval of the depth-n branch cylinder of a (general) beta map.
  static std::pair<double, double> beta_cylinder_interval(const DynamicalSystem& sys,
                                                          std::span<const int> word);

  double parry_density(double x) const;
  /// Integral of the Parry density over [a, b].
  double parry_interval_mass(double a, double b) const;

  /// GibbsCylinder only: pressure estimate log Z_n - log Z_{n-1} at n_max.
  double gibbs_pressure() const;
  double gibbs_log_partition(int n) const;
  int gibbs_n_max() const { return gibbs_n_max_; }
  const std::function<double(double)>& gibbs_phi() const { return gibbs_phi_; }
  /// Max over tested depths of the inconsistency between depth-(m) and
  /// depth-(m+1) normalizations of the same cylinder mass.
  double consistency_defect(const DynamicalSystem& sys, int depth, std::uint64_t seed) const;

 private:
  Kind kind_ = Kind::Lebesgue;
  std::string name_;
  bool invariant_ = true, ergodic_ = true;
  std::optional<double> entropy_;
  std::vector<double> p_;                    // Bernoulli probabilities
  std::vector<std::vector<double>> rows_;    // Markov transition rows
  std::vector<double> pi_;                   // Markov stationary vector
  double beta_ = 0.0;                        // ParryBeta
  std::vector<double> parry_breaks_;         // sorted breakpoints of the density
  std::vector<double> parry_density_vals_;   // density on each piece
  std::vector<double> parry_cdf_;            // cdf at breakpoints
  std::uint64_t orbit_seed_ = 0;             // EmpiricalOrbit
  int burn_in_ = 64;
  std::function<double(double)> gibbs_phi_;  // GibbsCylinder
  int gibbs_n_max_ = 0;
  int gibbs_grid_ = 0;
  std::vector<std::vector<double>> gibbs_log_h_;  // log (L^m 1) on the grid
  std::vector<double> gibbs_log_z_;

  double gibbs_log_h_at(int m, double y) const;
  void build_parry();
  void build_gibbs();
};

/// Representative point of the n-cylinder [word]: periodic extension on
/// shifts, left cylinder endpoint on (affine-branch) interval maps.
Point cylinder_representative(const DynamicalSystem& sys, const std::vector<int>& word);

/// Visits every admissible n-word of the system's symbolic coding (SFT
/// transitions respected; inadmissible beta words are still visited and carry
/// zero cylinder width).
void for_each_word(const DynamicalSystem& sys, int n,
                   const std::function<void(const std::vector<int>&)>& fn);

}  // namespace natf

#endif
