#include "bdlab/lie.hpp"

#include <algorithm>
#include <cmath>

#include "bdlab/errors.hpp"

namespace bdlab {

namespace {

int levi_civita(int a, int b, int c) {
  if (a == b || b == c || a == c) return 0;
  return ((b - a + 3) % 3 == 1) ? 1 : -1;
}

}  // namespace

LieStructure::LieStructure(Group g) : group_(g) {
  const cplx i(0.0, 1.0);
  if (g == Group::U1) {
    DenseMat t(1, 1);
    t(0, 0) = i;
    gens_.push_back(t);
    return;
  }
  DenseMat s1(2, 2), s2(2, 2), s3(2, 2);
  s1 << 0, 1, 1, 0;
  s2 << 0, -i, i, 0;
  s3 << 1, 0, 0, -1;
  for (const auto* s : {&s1, &s2, &s3}) gens_.push_back(i * *s);
}

LieStructure LieStructure::parse(const std::string& name) {
  if (name == "U1") return LieStructure(Group::U1);
  if (name == "SU2") return LieStructure(Group::SU2);
  throw DomainError("unknown gauge group '" + name + "' (expected U1 or SU2)");
}

const DenseMat& LieStructure::generator(int a) const {
  if (a < 0 || a >= count()) throw IndexError("generator index out of range");
  return gens_[static_cast<std::size_t>(a)];
}

double LieStructure::structure_constant(int a, int b, int c) const {
  if (group_ == Group::U1) return 0.0;
  return -2.0 * levi_civita(a, b, c);
}

double LieStructure::component(int a, const DenseMat& m) const {
  const DenseMat& t = generator(a);
  return (t.adjoint() * m).trace().real() / (t.adjoint() * t).trace().real();
}

double LieStructure::closure_defect() const {
  double worst = 0.0;
  for (int a = 0; a < count(); ++a) {
    const DenseMat& ta = generator(a);
    worst = std::max(worst, (ta + ta.adjoint()).cwiseAbs().maxCoeff());
    for (int b = 0; b < count(); ++b) {
      DenseMat lhs = ta * generator(b) - generator(b) * ta;
      for (int c = 0; c < count(); ++c) lhs -= structure_constant(a, b, c) * generator(c);
      worst = std::max(worst, lhs.cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

DenseMat unitary_exp(const DenseMat& m) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m + m.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale) throw DomainError("unitary_exp: argument is not anti-hermitian");
  const cplx i(0.0, 1.0);
  DenseMat h = i * m;
  h = 0.5 * (h + h.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<DenseMat> es(h);
  Eigen::VectorXcd phase(es.eigenvalues().size());
  for (Eigen::Index k = 0; k < phase.size(); ++k) phase[k] = std::exp(-i * es.eigenvalues()[k]);
  return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

DenseMat polar_unitary(const DenseMat& m) {
  Eigen::JacobiSVD<DenseMat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

double unitarity_defect(const DenseMat& u) {
  return (u.adjoint() * u - DenseMat::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

}  // namespace bdlab
