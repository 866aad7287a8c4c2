#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bdlab/lie.hpp"

namespace bdlab {

/// coeff * trig(2 pi k.m / L), trig = cos or sin; tagged with a Lie generator
/// and a spatial axis where relevant.
struct TrigTerm {
  int generator = 0;
  int axis = 0;
  std::vector<int> k;
  bool sine = false;
  double coeff = 0.0;
};

struct TrigValue {
  double value = 0.0;
  std::vector<double> gradient;
};

/// Value and gradient at `point` of the terms selected by `keep`.
template <class Pred>
TrigValue eval_trig(std::span<const TrigTerm> terms, double L, std::span<const double> point, Pred keep);

/// g(m) = prod_a exp(chi_a(m) T_a), left to right in generator order, where
/// chi_a collects the terms tagged with generator a (axis is ignored).
struct GaugeFunction {
  std::vector<TrigTerm> terms;
};

/// Lie-algebra valued one-form A = sum_mu A_mu dx^mu on T^d with trig-polynomial
/// coefficients, optionally followed by a gauge transformation
///   A' = g A g^-1 + (dg) g^-1.
class Connection {
 public:
  Connection(LieStructure lie, int dim, double L, std::vector<TrigTerm> terms);

  /// Structured text: `group = SU2`, `d = 2`, `L = 6.28...`, then lines
  /// `term <generator> <axis> <k1:k2:...> <cos|sin> <coeff>`; `#` starts a comment.
  static Connection parse(std::istream& in);
  std::string to_text() const;

  const LieStructure& lie() const { return lie_; }
  int dim() const { return d_; }
  double circumference() const { return L_; }
  const std::vector<TrigTerm>& terms() const { return terms_; }
  const std::optional<GaugeFunction>& gauge() const { return gauge_; }
  int max_harmonic() const;

  /// A_mu at a point, mu = 0..d-1.
  std::vector<DenseMat> eval(std::span<const double> point) const;

  Connection gauge_transformed(GaugeFunction g) const;

  /// g(m); identity when no gauge transformation is attached.
  DenseMat gauge_element(std::span<const double> point) const;

 private:
  LieStructure lie_;
  int d_;
  double L_;
  std::vector<TrigTerm> terms_;
  std::optional<GaugeFunction> gauge_;
};

/// g(m) and its partial derivatives for a gauge function.
struct GaugeSample {
  DenseMat g;
  std::vector<DenseMat> dg;
};
GaugeSample eval_gauge(const LieStructure& lie, const GaugeFunction& gf, int dim, double L,
                       std::span<const double> point);

/// conn - t * omega, coefficient-wise. Both must share group, d, L and carry no gauge transformation.
Connection translate_connection(const Connection& conn, const Connection& omega, double t);

}  // namespace bdlab

#include "bdlab/connection_impl.hpp"
