#include "bdlab/operator_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include <unsupported/Eigen/KroneckerProduct>

#include "bdlab/errors.hpp"

namespace bdlab {

namespace {

constexpr double kSymmetryTol = 1e-13;

double defect(const SparseMat& m, double sign) {
  SparseMat adj = m.adjoint();
  SparseMat diff = m - sign * adj;
  return max_abs(diff);
}

}  // namespace

OperatorMatrix::OperatorMatrix(SparseMat m, Symmetry sym) : m_(std::move(m)), sym_(sym) {
  if (m_.rows() != m_.cols()) {
    throw DomainError("OperatorMatrix: matrix must be square");
  }
  m_.makeCompressed();
  const double scale = std::max(1.0, max_abs(m_));
  if (sym_ == Symmetry::hermitian && hermiticity_defect() > kSymmetryTol * scale) {
    throw DomainError("OperatorMatrix: declared hermitian but defect is " +
                      std::to_string(hermiticity_defect()));
  }
  if (sym_ == Symmetry::anti_hermitian && antihermiticity_defect() > kSymmetryTol * scale) {
    throw DomainError("OperatorMatrix: declared anti-hermitian but defect is " +
                      std::to_string(antihermiticity_defect()));
  }
}

double OperatorMatrix::hermiticity_defect() const { return defect(m_, 1.0); }

double OperatorMatrix::antihermiticity_defect() const { return defect(m_, -1.0); }

void OperatorMatrix::write_coo(std::ostream& os) const {
  char buf[128];
  for (int col = 0; col < m_.outerSize(); ++col) {
    for (SparseMat::InnerIterator it(m_, col); it; ++it) {
      std::snprintf(buf, sizeof buf, "%lld %lld %.17g %.17g\n", static_cast<long long>(it.row()),
                    static_cast<long long>(it.col()), it.value().real(), it.value().imag());
      os << buf;
    }
  }
}

SparseMat identity(std::size_t dim) {
  SparseMat id(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  id.setIdentity();
  return id;
}

SparseMat kron(const SparseMat& a, const SparseMat& b) {
  SparseMat out = Eigen::kroneckerProduct(a, b);
  out.prune(cplx(0.0, 0.0));
  return out;
}

SparseMat commutator(const SparseMat& a, const SparseMat& b) {
  SparseMat ab = a * b;
  SparseMat ba = b * a;
  return ab - ba;
}

SparseMat anticommutator(const SparseMat& a, const SparseMat& b) {
  SparseMat ab = a * b;
  SparseMat ba = b * a;
  return ab + ba;
}

double max_abs(const SparseMat& m) {
  double out = 0.0;
  for (int col = 0; col < m.outerSize(); ++col) {
    for (SparseMat::InnerIterator it(m, col); it; ++it) {
      out = std::max(out, std::abs(it.value()));
    }
  }
  return out;
}

double column_difference(const SparseMat& a, const SparseMat& b,
                         std::span<const std::size_t> cols) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DomainError("column_difference: shape mismatch");
  }
  double out = 0.0;
  for (std::size_t j : cols) {
    Vec ca = a.col(static_cast<Eigen::Index>(j));
    Vec cb = b.col(static_cast<Eigen::Index>(j));
    if (ca.size() > 0) out = std::max(out, (ca - cb).cwiseAbs().maxCoeff());
  }
  return out;
}

SparseMat compress(const SparseMat& a, std::span<const std::size_t> keep) {
  std::vector<Eigen::Index> position(static_cast<std::size_t>(a.rows()), -1);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    position[keep[i]] = static_cast<Eigen::Index>(i);
  }
  std::vector<Eigen::Triplet<cplx>> trips;
  for (std::size_t jn = 0; jn < keep.size(); ++jn) {
    for (SparseMat::InnerIterator it(a, static_cast<Eigen::Index>(keep[jn])); it; ++it) {
      const Eigen::Index in = position[static_cast<std::size_t>(it.row())];
      if (in >= 0) trips.emplace_back(in, static_cast<Eigen::Index>(jn), it.value());
    }
  }
  const auto n = static_cast<Eigen::Index>(keep.size());
  SparseMat out(n, n);
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

double inf_norm(const SparseMat& a) {
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(a.rows());
  for (int col = 0; col < a.outerSize(); ++col) {
    for (SparseMat::InnerIterator it(a, col); it; ++it) rows[it.row()] += std::abs(it.value());
  }
  return rows.size() ? rows.maxCoeff() : 0.0;
}

double operator_norm(const SparseMat& a, int max_iter, double rel_tol) {
  if (a.cols() == 0) return 0.0;
  Vec v(a.cols());
  // Fixed, non-symmetric start vector so results are reproducible.
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    v[i] = cplx(1.0 + 0.37 * std::sin(1.3 * static_cast<double>(i) + 0.1),
                0.21 * std::cos(0.7 * static_cast<double>(i)));
  }
  v.normalize();
  const SparseMat adj = a.adjoint();
  double sigma2 = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Vec w = adj * (a * v);
    const double next = w.norm();
    if (next == 0.0) return 0.0;
    v = w / next;
    if (std::abs(next - sigma2) <= rel_tol * next) {
      sigma2 = next;
      break;
    }
    sigma2 = next;
  }
  return std::sqrt(sigma2);
}

}  // namespace bdlab
