#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bdlab/bott_dirac.hpp"
#include "bdlab/spectral_basis.hpp"
#include "bdlab/test_functions.hpp"

namespace bdlab {

struct QuadratureSpec {
  enum class Kind { gauss_hermite, monte_carlo };
  Kind kind = Kind::gauss_hermite;
  int order = 40;
  std::size_t samples = 0;
  std::optional<std::uint64_t> seed;  ///< required for Monte Carlo

  static QuadratureSpec gh(int order, std::optional<std::uint64_t> seed = std::nullopt);
  static QuadratureSpec mc(std::size_t samples, std::optional<std::uint64_t> seed);
  /// `gh:<order>` or `mc:<samples>`.
  static QuadratureSpec parse(const std::string& text, std::optional<std::uint64_t> seed);
  void validate() const;
};

/// Above this many modes, or order^n points, non-separable functions switch from
/// the tensor rule to a single 1-D rule on the variance of the sum.
inline constexpr int kTensorMaxModes = 8;
inline constexpr std::size_t kTensorMaxPoints = std::size_t{1} << 22;

struct Expectation {
  std::complex<double> value;
  double std_error = 0.0;  ///< zero for deterministic quadrature
  std::string method;      ///< "product", "moments", "tensor", "collapsed", "monte_carlo"
};

/// E f(sum_i a_i y_i) with independent y_i ~ N(0, tau2 / (2 s_i)).
///
/// Modes are put in a canonical order by (s, a) first, so relabeling modes with
/// identical data gives bit-identical results.
Expectation gaussian_expectation(std::span<const double> a, std::span<const double> s, double tau2,
                                 const TestFunction& f, const QuadratureSpec& quad);

/// Ground-state expectation of M_f at `point`: a_i = xi_i(point).
/// Throws ConditionVeto when the basis fails the sum s^-1 |xi|^2 condition.
Expectation expectation_ground(const ModeBasis& basis, const FockSpec& fock, const TestFunction& f,
                               std::span<const double> point, const QuadratureSpec& quad);

/// Sobolev coefficients x_i = (1 + tau1 lambda_i^sigma) <g, e_i> by a G^d grid sum.
FieldConfig embed(const ModeBasis& basis, const std::function<double(std::span<const double>)>& g,
                  int grid);

struct TailRow {
  std::size_t n = 0;
  std::complex<double> value;
  double increment = 0.0;  ///< |I_n - I_{n-1}|, with I_0 = f(0)
  double bound = 0.0;      ///< C s^-1 |xi_n|^2 + B s^-2 |xi_n|^3
};

struct TailReport {
  double C = 0.0;  ///< tau2 sup|f''| / 4
  double B = 0.0;  ///< tau2^2 sup|f'''|
  std::vector<TailRow> rows;
  bool all_within = true;
};

TailReport tail_bound_check(const ModeBasis& basis, const FockSpec& fock, const TestFunction& f,
                            std::span<const double> point, std::size_t n_from, std::size_t n_to,
                            const QuadratureSpec& quad);

/// <gs| U_{t omega} |gs> by per-mode Gauss-Hermite quadrature of the shifted ground state.
double translate_overlap(const FockSpec& fock, std::span<const double> omega, double t, int order = 80);

struct ContinuityRow {
  double t = 0.0;
  std::complex<double> value;
  double deviation = 0.0;  ///< |value - value at t = 0|
  double bound = 0.0;      ///< t^2 sum xi^2 tau2 / (4 s)
};

struct ContinuityReport {
  std::vector<ContinuityRow> rows;
  double fitted_order = 0.0;  ///< see convergence_order
  double order_error = 0.0;   ///< larger of the extrapolation step and the rounding bound on the slopes
  std::complex<double> first_derivative;   ///< Richardson-extrapolated at t = 0
  std::complex<double> second_derivative;
  double expected_second = 0.0;         ///< - sum xi^2 tau2 / (2 s)
};

struct OrderFit {
  double order = 0.0;
  double error = 0.0;  ///< size of the last extrapolation step; infinite for a plain fit
};

/// Order p in deviation ~ t^p. For a halving t sequence the local slopes are
/// Richardson-extrapolated (their drift is even in t); otherwise a plain
/// least-squares slope is returned.
OrderFit convergence_order(std::span<const double> log_t, std::span<const double> log_dev);

enum class ProbeFamily { characteristic, constant };

ContinuityReport strong_continuity_probe(const ModeBasis& basis, const FockSpec& fock, ProbeFamily family,
                                         std::span<const double> point, std::span<const double> t_sequence,
                                         const QuadratureSpec& quad);

}  // namespace bdlab
