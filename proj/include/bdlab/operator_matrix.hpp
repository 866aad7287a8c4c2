#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace bdlab {

using cplx = std::complex<double>;
using SparseMat = Eigen::SparseMatrix<cplx>;
using DenseMat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

enum class Symmetry { hermitian, anti_hermitian, none };

/// Square sparse complex matrix tagged with the symmetry it is known to carry.
///
/// The tag is verified on construction: a declared hermitian (anti-hermitian)
/// matrix must satisfy ||A -/+ A^dagger||_max <= 1e-13 * max(1, ||A||_max),
/// otherwise construction throws DomainError.
class OperatorMatrix {
 public:
  OperatorMatrix() = default;
  explicit OperatorMatrix(SparseMat m, Symmetry sym = Symmetry::none);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const SparseMat& matrix() const { return m_; }
  Symmetry symmetry() const { return sym_; }

  /// ||A - A^dagger||_max.
  double hermiticity_defect() const;
  /// ||A + A^dagger||_max.
  double antihermiticity_defect() const;

  DenseMat dense() const { return DenseMat(m_); }

  /// Coordinate-list dump, one `row col re im` line per stored nonzero.
  void write_coo(std::ostream& os) const;

 private:
  SparseMat m_;
  Symmetry sym_ = Symmetry::none;
};

SparseMat identity(std::size_t dim);
SparseMat kron(const SparseMat& a, const SparseMat& b);
SparseMat commutator(const SparseMat& a, const SparseMat& b);
SparseMat anticommutator(const SparseMat& a, const SparseMat& b);

/// Largest entry modulus; zero for an empty matrix.
double max_abs(const SparseMat& m);

/// max |(a - b) e_j| over the listed columns j.
double column_difference(const SparseMat& a, const SparseMat& b, std::span<const std::size_t> cols);

/// Compression P A P onto the coordinate subspace spanned by `keep` (ordered).
SparseMat compress(const SparseMat& a, std::span<const std::size_t> keep);

/// Upper bound on the spectral norm: max absolute row sum.
double inf_norm(const SparseMat& a);

/// Spectral norm by power iteration on A^dagger A (deterministic start).
double operator_norm(const SparseMat& a, int max_iter = 500, double rel_tol = 1e-12);

}  // namespace bdlab
