#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bdlab {

/// Flat torus T^d with one shared circumference L per axis.
struct TorusGeometry {
  int dim = 1;
  double circumference = 6.283185307179586;

  void validate() const;
  double volume() const;
};

/// Sobolev weight (1 + tau1 * lambda^sigma)^-1 attached to each Laplace mode.
struct SobolevParams {
  double tau1 = 1.0;
  double sigma = 1.0;

  void validate() const;
  double factor(double lambda) const;
};

enum class Parity { constant, cos, sin };

const char* parity_name(Parity p);

/// One real Laplace eigenmode: e(m) = c * trig(2 pi k.m / L), xi = e / (1 + tau1 lambda^sigma).
///
/// Wavevectors k are half-lattice representatives (first nonzero component positive);
/// each carries a cos and a sin mode. The constant mode has k = 0.
struct Mode {
  std::size_t index = 0;
  std::vector<int> k;
  Parity parity = Parity::constant;
  double lambda = 0.0;    ///< (2 pi / L)^2 |k|^2
  double momentum = 0.0;  ///< |p| = (2 pi / L) |k|
  double s = 1.0;
  double l2_supnorm = 0.0;  ///< ||e||_inf
  double supnorm = 0.0;     ///< ||xi||_inf
};

/// Rule assigning the weight s_i to each mode.
struct WeightRule {
  enum class Kind { massive, photon, custom };
  Kind kind = Kind::massive;
  double mass = 1.0;
  std::optional<double> floor;  ///< photon only: s = max(|p|, floor)
  std::vector<double> custom;

  static WeightRule massive(double m);
  static WeightRule photon(std::optional<double> floor = std::nullopt);
  static WeightRule custom_list(std::vector<double> s);

  std::string describe() const;
};

struct BasisOptions {
  bool include_zero_mode = true;
};

/// Upper limit on the number of modes a basis may hold.
inline constexpr std::size_t kMaxBasisModes = 2'000'000;

/// Sobolev-orthonormal real Laplace eigenbasis in canonical order
/// (lambda, lexicographic k, cos before sin). Immutable after construction.
class ModeBasis {
 public:
  ModeBasis(TorusGeometry geometry, SobolevParams params, WeightRule rule, BasisOptions options,
            std::vector<Mode> modes);

  const TorusGeometry& geometry() const { return geometry_; }
  const SobolevParams& params() const { return params_; }
  const WeightRule& weight_rule() const { return rule_; }
  const BasisOptions& options() const { return options_; }
  std::size_t size() const { return modes_.size(); }
  const Mode& mode(std::size_t i) const;
  const std::vector<Mode>& modes() const { return modes_; }
  std::vector<double> weights() const;
  int max_harmonic() const;  ///< max_i max_a |k_a|

  /// Laplace eigenfunction e_i (L^2-normalized, no Sobolev factor).
  double eval_l2(std::size_t i, std::span<const double> point) const;
  /// Sobolev-normalized xi_i.
  double eval(std::size_t i, std::span<const double> point) const;

  /// Basis restricted to its first n modes.
  ModeBasis prefix(std::size_t n) const;

 private:
  TorusGeometry geometry_;
  SobolevParams params_;
  WeightRule rule_;
  BasisOptions options_;
  std::vector<Mode> modes_;
};

ModeBasis build_basis(const TorusGeometry& geometry, const SobolevParams& params, std::size_t n,
                      const WeightRule& rule, const BasisOptions& options = {});

double eval_mode(const ModeBasis& basis, std::size_t i, std::span<const double> point);

/// Point of the configuration space, sum_i coeffs[i] xi_i.
struct FieldConfig {
  std::vector<double> coeffs;
};

double sobolev_inner(const ModeBasis& basis, const FieldConfig& a, const FieldConfig& b);

/// Partial sums of the two mode-sum conditions over the truncation, with
/// asymptotic tail estimates and convergence verdicts.
struct ConvergenceReport {
  double sum_sinv_xi2 = 0.0;  ///< sum s_i^-1 ||xi_i||_inf^2
  double sum_xi2 = 0.0;       ///< sum ||xi_i||_inf^2
  double tail_sinv_xi2 = 0.0;  ///< estimated remainder beyond the truncation (inf if divergent)
  double tail_xi2 = 0.0;
  double weight_exponent = 0.0;  ///< alpha in s ~ |k|^alpha
  double decay_exponent = 0.0;   ///< beta in ||xi||^2 ~ |k|^-beta
  bool condition_sinv_converges = false;
  bool condition_sup_converges = false;
  std::vector<double> increments_sinv;  ///< per-mode terms s_i^-1 ||xi_i||^2
  std::vector<double> increments_sup;   ///< per-mode terms ||xi_i||^2
};

ConvergenceReport convergence_report(const ModeBasis& basis);

/// CSV dump `index,k,parity,lambda,s,supnorm`; k components joined with ':'.
void write_basis_csv(std::ostream& os, const ModeBasis& basis);

/// Reduce a coordinate into [0, L).
double wrap_coordinate(double x, double L);

}  // namespace bdlab
