#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bdlab/clifford_fock.hpp"
#include "bdlab/errors.hpp"
#include "bdlab/fluctuations.hpp"

using namespace bdlab;

namespace {

const double kPi = std::numbers::pi;

std::vector<OperatorMatrix> theta_family(const FockSpec& fock) {
  const auto basis = build_basis({1, 2 * kPi}, {1.0, 1.0}, static_cast<std::size_t>(fock.n), WeightRule::custom_list(fock.s));
  const std::vector<double> p{0.9};
  return {theta_position(fock, 0), theta_position(fock, fock.n - 1), theta_function(fock, 0, TestFunction::bump(0.7)),
          theta_function(fock, 1, TestFunction::cosine(1.3)), theta_field(basis, fock, p)};
}

}  // namespace

TEST_CASE("one-form vanishes for zero theta and zero coupling") {
  const FockSpec fock{2, 4, 1.0, {1.0, 2.0}};
  const auto B = assemble_B(fock);
  const FluctuationSpec zero{OperatorMatrix(SparseMat(fock.dim(), fock.dim()), Symmetry::hermitian), true, 1.0};
  CHECK(max_abs(one_form(zero, fock).matrix()) == 0.0);
  const FluctuationSpec off{theta_position(fock, 0), true, 0.0};
  CHECK(max_abs(fluctuated_B(off, fock).matrix() - B.matrix()) == 0.0);
  CHECK(max_abs(interaction_hamiltonian(off, fock).matrix()) == 0.0);
}

TEST_CASE("one-form for theta = x on a 4x4 truncation matches hand algebra") {
  const double tau2 = 1.0, s = 1.0;
  const FockSpec fock{1, 2, tau2, {s}};
  const FluctuationSpec spec{theta_position(fock, 0), false, 1.0};
  // Truncated [d, x] = diag(1, -1), so Theta [B, Theta] = tau2 (x diag(1,-1)) (x) cbar.
  const double u = std::sqrt(tau2 / (2 * s));
  SparseMat xc(2, 2);
  xc.insert(0, 1) = -u;
  xc.insert(1, 0) = u;
  const SparseMat oracle = kron(xc, clifford(FermionSpace(1), 0).cbar.matrix()) * cplx(tau2);
  CHECK(max_abs(one_form(spec, fock).matrix() - oracle) <= 1e-15);
}

TEST_CASE("one-form is odd under fermion parity and H_fluc's anticommutator term is even") {
  const FockSpec fock{2, 4, 1.0, {1.0, 1.5}};
  const SparseMat g = grading(fock).matrix();
  const SparseMat B = assemble_B(fock).matrix();
  for (const auto& theta : theta_family(fock)) {
    for (bool sym : {false, true}) {
      const SparseMat A = one_form({theta, sym, 0.8}, fock).matrix();
      CHECK(max_abs(anticommutator(g, A)) <= 1e-14);
      CHECK(max_abs(commutator(g, anticommutator(B, A))) <= 1e-13);
      CHECK(max_abs(commutator(g, SparseMat(A * A))) <= 1e-13);
    }
  }
}

TEST_CASE("symmetrized fluctuation is hermitian; the raw one reports its defect") {
  const FockSpec fock{2, 5, 1.0, {1.0, 2.0}};
  const auto theta = theta_position(fock, 0);
  const auto sym = fluctuated_B({theta, true, 1.0}, fock);
  CHECK(sym.hermiticity_defect() <= 1e-13);
  const auto raw_a = one_form({theta, false, 1.0}, fock);
  const auto raw = fluctuated_B({theta, false, 1.0}, fock);
  CHECK(raw.hermiticity_defect() > 1e-3);
  CHECK(std::abs(raw.hermiticity_defect() - raw_a.hermiticity_defect()) <= 1e-14);
}

TEST_CASE("fluctuated square decomposes exactly for the theta family") {
  const FockSpec fock{2, 6, 1.0, {1.0, 2.0}};
  const SparseMat B = assemble_B(fock).matrix();
  const SparseMat B2 = B * B;
  for (const auto& theta : theta_family(fock)) {
    for (bool sym : {false, true}) {
      const FluctuationSpec spec{theta, sym, 0.6};
      const SparseMat Bt = fluctuated_B(spec, fock).matrix();
      const SparseMat H = interaction_hamiltonian(spec, fock).matrix();
      const double scale = std::max(1.0, max_abs(B2));
      CHECK(max_abs(SparseMat(Bt * Bt) - B2 - H) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("H_fluc is an exact quadratic polynomial in the coupling") {
  const FockSpec fock{2, 5, 0.7, {1.0, 1.4}};
  const auto theta = theta_function(fock, 1, TestFunction::bump(0.5));
  const SparseMat B = assemble_B(fock).matrix();
  const SparseMat A1 = one_form({theta, true, 1.0}, fock).matrix();
  for (double lam : {0.3, 0.7, 1.5}) {
    const SparseMat H = interaction_hamiltonian({theta, true, lam}, fock).matrix();
    const SparseMat poly = cplx(lam) * anticommutator(B, A1) + cplx(lam * lam) * SparseMat(A1 * A1);
    CHECK(max_abs(H - poly) <= 1e-12);
  }
}

TEST_CASE("symmetrized position-type fluctuations vanish away from the cutoff") {
  // For Theta = Theta(x), Theta [B, Theta] = tau2 sum cbar_i Theta d_i Theta is anti-hermitian,
  // so the hermitian part is a pure cutoff effect and the interior spectrum stays free.
  const FockSpec fock{1, 12, 1.0, {1.0}};
  const std::vector<double> expect{0, 2, 2, 4, 4};
  for (double lam : {0.0, 0.1, 0.5, 2.0}) {
    const auto sp = fluct_spectrum({theta_position(fock, 0), true, lam}, fock, 5);
    for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(sp.eigenvalues[i] - expect[i]) <= 1e-9);
    CHECK(std::abs(sp.gap - 2.0) <= 1e-9);
  }
  const FockSpec two{2, 8, 1.0, {1.0, 2.0}};
  const SparseMat A = one_form({theta_position(two, 1), false, 1.0}, two).matrix();
  const auto cols = interior_states(two, 2);
  CHECK(column_difference(A, SparseMat(-SparseMat(A.adjoint())), cols) <= 1e-13);
}

TEST_CASE("fluctuated spectrum: positivity and continuity along a coupling ramp") {
  const FockSpec fock{1, 16, 1.0, {1.0}};
  const auto theta = theta_dilation(fock, 0);
  CHECK(one_form({theta, true, 1.0}, fock).hermiticity_defect() <= 1e-13);
  CHECK(max_abs(one_form({theta, true, 1.0}, fock).matrix()) > 0.1);
  const std::vector<double> lams{0.0, 0.025, 0.05, 0.1, 0.2};
  std::vector<std::vector<double>> curves;
  for (double lam : lams) {
    const auto sp = fluct_spectrum({theta, true, lam}, fock, 5, 6);
    CHECK(sp.eigenvalues.front() >= -1e-10);
    CHECK(sp.hermiticity_defect <= 1e-13);
    curves.push_back(sp.eigenvalues);
  }
  // On interior states the symmetrized dilation one-form rescales B by 1 + lambda/2.
  const std::vector<double> expect{0, 2, 2, 4, 4};
  for (std::size_t j = 0; j < lams.size(); ++j) {
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK(std::abs(curves[j][i] - expect[i] * std::pow(1 + lams[j] / 2, 2)) <= 1e-9);
    }
  }
  // Slope fitted on the first step bounds every later step (the curve is convex, slope grows by <= 1 + lambda/2).
  for (std::size_t i = 0; i < 5; ++i) {
    const double C = std::abs(curves[1][i] - curves[0][i]) / lams[1];
    for (std::size_t j = 1; j + 1 < lams.size(); ++j) {
      const double dl = lams[j + 1] - lams[j];
      CHECK(std::abs(curves[j + 1][i] - curves[j][i]) <= C * (1 + lams.back()) * dl + 1e-12);
    }
  }
  CHECK_THROWS_AS(fluct_spectrum({theta, false, 0.1}, fock, 3), DomainError);
}

TEST_CASE("D_tot fluctuation uses a lifted theta and satisfies the same identity") {
  const FockSpec fock{1, 5, 1.0, {1.0}};
  const std::vector<int> spatial{1, 2, 3};
  const auto D = dirac_total(fock, spatial);
  const auto theta = lift_theta(theta_position(fock, 0), spatial.size());
  const FluctuationSpec spec{theta, true, 0.4};
  const SparseMat Dt = fluctuated_B(spec, D).matrix();
  const SparseMat H = interaction_hamiltonian(spec, D).matrix();
  const SparseMat D2 = D.matrix() * D.matrix();
  CHECK(max_abs(SparseMat(Dt * Dt) - D2 - H) <= 1e-12 * std::max(1.0, max_abs(D2)));
  CHECK_THROWS_AS(one_form({theta_position(fock, 0), true, 1.0}, D), DomainError);
}

TEST_CASE("fluctuation rejects non-hermitian theta and non-finite coupling") {
  const FockSpec fock{1, 3, 1.0, {1.0}};
  const auto d = mode_ladders(fock, 0).d;
  CHECK_THROWS_AS(one_form({d, true, 1.0}, fock), DomainError);
  CHECK_THROWS_AS(one_form({theta_position(fock, 0), true, std::nan("")}, fock), DomainError);
}
