#include "bdlab/quadrature.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "bdlab/errors.hpp"

namespace bdlab {

GaussRule gauss_hermite(int order) {
  if (order < 1) throw DomainError("gauss_hermite: order must be positive");
  if (order > 400) throw CapacityError("gauss_hermite: order above 400");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(order, order);
  for (int k = 0; k + 1 < order; ++k) J(k, k + 1) = J(k + 1, k) = std::sqrt((k + 1) / 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  GaussRule rule;
  const double mu0 = std::sqrt(std::numbers::pi);
  for (int k = 0; k < order; ++k) {
    rule.nodes.push_back(es.eigenvalues()[k]);
    const double v0 = es.eigenvectors()(0, k);
    rule.weights.push_back(mu0 * v0 * v0);
  }
  // Symmetrize to remove eigensolver round-off so odd moments vanish exactly.
  for (int k = 0; k < order / 2; ++k) {
    const auto a = static_cast<std::size_t>(k);
    const auto b = static_cast<std::size_t>(order - 1 - k);
    const double x = 0.5 * (rule.nodes[b] - rule.nodes[a]);
    const double w = 0.5 * (rule.weights[a] + rule.weights[b]);
    rule.nodes[a] = -x;
    rule.nodes[b] = x;
    rule.weights[a] = rule.weights[b] = w;
  }
  if (order % 2) rule.nodes[static_cast<std::size_t>(order / 2)] = 0.0;
  return rule;
}

GaussRule gauss_laguerre(int order) {
  if (order < 1) throw DomainError("gauss_laguerre: order must be positive");
  if (order > 400) throw CapacityError("gauss_laguerre: order above 400");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(order, order);
  for (int k = 0; k < order; ++k) {
    J(k, k) = 2.0 * k + 1.0;
    if (k + 1 < order) J(k, k + 1) = J(k + 1, k) = k + 1.0;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  GaussRule rule;
  for (int k = 0; k < order; ++k) {
    rule.nodes.push_back(es.eigenvalues()[k]);
    const double v0 = es.eigenvectors()(0, k);
    rule.weights.push_back(v0 * v0);
  }
  return rule;
}

}  // namespace bdlab
