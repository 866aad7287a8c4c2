#pragma once

#include <complex>
#include <string>
#include <vector>

namespace bdlab {

/// One-variable observables f(r) for the multiplication operators M_f, with
/// derivatives up to third order and their global sup bounds.
class TestFunction {
 public:
  enum class Kind { polynomial, exp_i, sine, cosine, bump };

  static TestFunction polynomial(std::vector<double> coeffs);  ///< sum c_k r^k, degree <= 4
  static TestFunction exp_i(double t);                          ///< e^{i t r}
  static TestFunction sine(double t);                           ///< sin(t r)
  static TestFunction cosine(double t);                         ///< cos(t r)
  static TestFunction bump(double width);                       ///< 1 / (1 + (r/w)^2)

  /// Parses `poly:c0,c1,...`, `exp:t`, `sin:t`, `cos:t`, `bump:w`.
  static TestFunction parse(const std::string& text);

  Kind kind() const { return kind_; }
  double parameter() const { return param_; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  int degree() const;  ///< polynomial degree, -1 for the others

  std::complex<double> operator()(double r) const { return derivative(0, r); }
  std::complex<double> derivative(int order, double r) const;

  /// sup over r of |f^(order)|; infinity when unbounded.
  double sup(int order) const;

  /// Factorizes as a product over independent Gaussian summands.
  bool separable() const { return kind_ == Kind::exp_i || kind_ == Kind::sine || kind_ == Kind::cosine; }

  std::string describe() const;

 private:
  TestFunction(Kind k, double p, std::vector<double> c) : kind_(k), param_(p), coeffs_(std::move(c)) {}
  Kind kind_;
  double param_;
  std::vector<double> coeffs_;
};

}  // namespace bdlab
