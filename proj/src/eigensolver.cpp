#include "bdlab/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bdlab/errors.hpp"
#include "bdlab/rng.hpp"

namespace bdlab {

namespace {

SpectrumResult dense_spectrum(const SparseMat& a, std::size_t count, double norm) {
  const DenseMat d(a);
  Eigen::SelfAdjointEigenSolver<DenseMat> es(d);
  if (es.info() != Eigen::Success) throw ConvergenceError("spectrum: dense eigensolver failed");
  SpectrumResult out;
  out.method = "dense";
  out.norm_estimate = norm;
  for (std::size_t k = 0; k < count; ++k) {
    const auto idx = static_cast<Eigen::Index>(k);
    const double lam = es.eigenvalues()[idx];
    out.eigenvalues.push_back(lam);
    out.residuals.push_back((d * es.eigenvectors().col(idx) - lam * es.eigenvectors().col(idx)).norm());
  }
  return out;
}

void orthogonalize(Vec& w, const std::vector<Vec>& basis) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& b : basis) w -= b.dot(w) * b;
  }
}

struct Locked {
  std::vector<Vec> vectors;
  std::vector<double> values;
  std::vector<double> residuals;
};

SpectrumResult lanczos_spectrum(const SparseMat& a, std::size_t count, double norm,
                                const EigenOptions& opt) {
  const auto n = static_cast<std::size_t>(a.rows());
  const double tol = opt.rel_tol * std::max(norm, 1e-300);
  const int kdim = opt.krylov_dim > 0 ? opt.krylov_dim : std::max(60, static_cast<int>(3 * count));
  Locked locked;
  std::uint64_t stream = 0;

  auto random_start = [&]() {
    Vec v(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      v[static_cast<Eigen::Index>(i)] = cplx(counter_normal(opt.seed, 2 * stream, i),
                                             counter_normal(opt.seed, 2 * stream + 1, i));
    }
    ++stream;
    return v;
  };

  for (int cycle = 0; cycle < opt.max_cycles; ++cycle) {
    if (locked.vectors.size() >= n) break;
    Vec v = random_start();
    orthogonalize(v, locked.vectors);
    if (v.norm() < 1e-12) break;
    v.normalize();

    double cycle_lowest = 0.0;
    bool converged = false;
    for (int restart = 0; restart < opt.max_restarts && !converged; ++restart) {
      const std::size_t room = n - locked.vectors.size();
      const int m = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(kdim), room));
      std::vector<Vec> V{v};
      std::vector<double> alpha, beta;
      int used = m;
      for (int j = 0; j < m; ++j) {
        Vec w = a * V[static_cast<std::size_t>(j)];
        const double al = V[static_cast<std::size_t>(j)].dot(w).real();
        alpha.push_back(al);
        orthogonalize(w, V);
        orthogonalize(w, locked.vectors);
        const double be = w.norm();
        if (j == m - 1 || be <= 1e-13 * std::max(norm, 1e-300)) {
          beta.push_back(be);
          used = j + 1;
          break;
        }
        beta.push_back(be);
        V.push_back(w / be);
      }
      Eigen::MatrixXd T = Eigen::MatrixXd::Zero(used, used);
      for (int j = 0; j < used; ++j) {
        T(j, j) = alpha[static_cast<std::size_t>(j)];
        if (j + 1 < used) T(j, j + 1) = T(j + 1, j) = beta[static_cast<std::size_t>(j)];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
      const double tail = beta[static_cast<std::size_t>(used - 1)];
      std::vector<Vec> fresh;
      Vec lowest_vec;
      for (int k = 0; k < used; ++k) {
        const double theta = es.eigenvalues()[k];
        const double estimate = std::abs(tail * es.eigenvectors()(used - 1, k));
        if (k > 0 && estimate > tol) continue;
        Vec y = Vec::Zero(static_cast<Eigen::Index>(n));
        for (int j = 0; j < used; ++j) y += es.eigenvectors()(j, k) * V[static_cast<std::size_t>(j)];
        y.normalize();
        if (k == 0) lowest_vec = y;
        if (estimate > tol) continue;
        const double res = (a * y - theta * y).norm();
        if (res > tol) continue;
        orthogonalize(y, fresh);
        orthogonalize(y, locked.vectors);
        if (y.norm() < 0.5) continue;
        y.normalize();
        fresh.push_back(y);
        locked.vectors.push_back(y);
        locked.values.push_back(theta);
        locked.residuals.push_back(res);
        if (k == 0) {
          converged = true;
          cycle_lowest = theta;
        }
      }
      if (!converged) {
        v = lowest_vec;
        orthogonalize(v, locked.vectors);
        if (v.norm() < 1e-12) throw ConvergenceError("spectrum: Lanczos restart vector collapsed");
        v.normalize();
      }
    }
    if (!converged) throw ConvergenceError("spectrum: Lanczos did not converge within the restart limit");
    if (locked.values.size() >= count) {
      std::vector<double> sorted = locked.values;
      std::sort(sorted.begin(), sorted.end());
      if (cycle_lowest >= sorted[count - 1] - tol) break;
    }
    if (cycle == opt.max_cycles - 1) throw ConvergenceError("spectrum: Lanczos cycle limit reached");
  }
  if (locked.values.size() < count) throw ConvergenceError("spectrum: fewer eigenpairs than requested");

  std::vector<std::size_t> order(locked.values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return locked.values[x] < locked.values[y]; });
  SpectrumResult out;
  out.method = "lanczos";
  out.norm_estimate = norm;
  for (std::size_t k = 0; k < count; ++k) {
    out.eigenvalues.push_back(locked.values[order[k]]);
    out.residuals.push_back(locked.residuals[order[k]]);
  }
  return out;
}

}  // namespace

SpectrumResult spectrum(const OperatorMatrix& op, std::size_t count, const EigenOptions& options) {
  const SparseMat& a = op.matrix();
  const double norm = inf_norm(a);
  if (op.hermiticity_defect() > 1e-12 * std::max(1.0, max_abs(a))) {
    throw DomainError("spectrum: operator is not hermitian");
  }
  if (count > op.dim()) throw DomainError("spectrum: count exceeds dimension");
  if (count == 0) return {{}, {}, "none", norm};
  bool dense = options.method == EigenOptions::Method::dense;
  if (options.method == EigenOptions::Method::automatic) dense = op.dim() < options.dense_limit;
  SpectrumResult out = dense ? dense_spectrum(a, count, norm) : lanczos_spectrum(a, count, norm, options);
  for (double r : out.residuals) {
    if (r > options.rel_tol * std::max(norm, 1.0)) {
      throw ConvergenceError("spectrum: residual above tolerance");
    }
  }
  return out;
}

}  // namespace bdlab
