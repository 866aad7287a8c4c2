#include "bdlab/clifford_fock.hpp"

#include <algorithm>
#include <bit>

#include "bdlab/errors.hpp"

namespace bdlab {

FermionSpace::FermionSpace(int n) : n_(n) {
  if (n < 0) throw DomainError("FermionSpace: negative mode count");
  if (n > kMaxFermionModes) throw CapacityError("FermionSpace: too many fermion modes");
}

std::size_t FermionSpace::encode(std::span<const int> occupied) const {
  std::size_t out = 0;
  for (int i : occupied) {
    if (i < 0 || i >= n_) throw IndexError("FermionSpace::encode: mode out of range");
    out |= std::size_t{1} << i;
  }
  return out;
}

std::vector<int> FermionSpace::decode(std::size_t index) const {
  if (index >= dim()) throw IndexError("FermionSpace::decode: index out of range");
  std::vector<int> out;
  for (int i = 0; i < n_; ++i) {
    if (index >> i & 1U) out.push_back(i);
  }
  return out;
}

ExtInt ext_int(const FermionSpace& space, int i) {
  if (i < 0 || i >= space.modes()) throw IndexError("ext_int: mode index out of range");
  const std::size_t dim = space.dim();
  const std::size_t bit = std::size_t{1} << i;
  std::vector<Eigen::Triplet<cplx>> trips;
  trips.reserve(dim / 2);
  for (std::size_t s = 0; s < dim; ++s) {
    if (s & bit) continue;
    const int below = std::popcount(s & (bit - 1));
    const double sign = below % 2 ? -1.0 : 1.0;
    trips.emplace_back(static_cast<Eigen::Index>(s | bit), static_cast<Eigen::Index>(s), sign);
  }
  SparseMat ext(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  ext.setFromTriplets(trips.begin(), trips.end());
  SparseMat in = ext.adjoint();
  return {OperatorMatrix(std::move(ext)), OperatorMatrix(std::move(in))};
}

CliffordPair clifford(const FermionSpace& space, int i) {
  auto [ext, in] = ext_int(space, i);
  SparseMat c = ext.matrix() + in.matrix();
  SparseMat cbar = ext.matrix() - in.matrix();
  return {OperatorMatrix(std::move(c), Symmetry::hermitian),
          OperatorMatrix(std::move(cbar), Symmetry::anti_hermitian)};
}

OperatorMatrix number_operator(const FermionSpace& space, std::span<const double> weights) {
  if (weights.size() != static_cast<std::size_t>(space.modes())) {
    throw DomainError("number_operator: weight count does not match mode count");
  }
  const std::size_t dim = space.dim();
  std::vector<Eigen::Triplet<cplx>> trips;
  for (std::size_t s = 0; s < dim; ++s) {
    double v = 0.0;
    for (int i = 0; i < space.modes(); ++i) {
      if (s >> i & 1U) v += weights[static_cast<std::size_t>(i)];
    }
    if (v != 0.0) trips.emplace_back(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s), v);
  }
  SparseMat m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  m.setFromTriplets(trips.begin(), trips.end());
  return OperatorMatrix(std::move(m), Symmetry::hermitian);
}

OperatorMatrix fermion_parity(const FermionSpace& space) {
  const std::size_t dim = space.dim();
  std::vector<Eigen::Triplet<cplx>> trips;
  trips.reserve(dim);
  for (std::size_t s = 0; s < dim; ++s) {
    trips.emplace_back(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s),
                       std::popcount(s) % 2 ? -1.0 : 1.0);
  }
  SparseMat m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  m.setFromTriplets(trips.begin(), trips.end());
  return OperatorMatrix(std::move(m), Symmetry::hermitian);
}

double car_violation(std::span<const SparseMat> annihilators) {
  double worst = 0.0;
  if (annihilators.empty()) return worst;
  const SparseMat id = identity(static_cast<std::size_t>(annihilators[0].rows()));
  for (std::size_t i = 0; i < annihilators.size(); ++i) {
    for (std::size_t j = 0; j < annihilators.size(); ++j) {
      SparseMat adj = annihilators[j].adjoint();
      SparseMat mixed = anticommutator(annihilators[i], adj);
      if (i == j) mixed -= id;
      worst = std::max(worst, max_abs(mixed));
      worst = std::max(worst, max_abs(anticommutator(annihilators[i], annihilators[j])));
    }
  }
  return worst;
}

double check_car(const FermionSpace& space) {
  std::vector<SparseMat> ann;
  for (int i = 0; i < space.modes(); ++i) ann.push_back(ext_int(space, i).in.matrix());
  return car_violation(ann);
}

double check_clifford(const FermionSpace& space) {
  const int n = space.modes();
  std::vector<CliffordPair> ops;
  for (int i = 0; i < n; ++i) ops.push_back(clifford(space, i));
  const SparseMat id = identity(space.dim());
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto& ci = ops[static_cast<std::size_t>(i)];
    for (int j = 0; j < n; ++j) {
      const auto& cj = ops[static_cast<std::size_t>(j)];
      SparseMat cc = anticommutator(ci.c.matrix(), cj.c.matrix());
      SparseMat bb = anticommutator(ci.cbar.matrix(), cj.cbar.matrix());
      if (i == j) {
        cc -= 2.0 * id;
        bb += 2.0 * id;
      }
      worst = std::max({worst, max_abs(cc), max_abs(bb),
                        max_abs(anticommutator(ci.c.matrix(), cj.cbar.matrix()))});
    }
  }
  return worst;
}

}  // namespace bdlab
