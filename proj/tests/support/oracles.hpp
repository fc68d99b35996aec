#pragma once

// Independent reference computations used only by tests.

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "zigzag/quadratic_model.hpp"

namespace oracle {

inline Eigen::MatrixXd householder(const Eigen::VectorXd& w) {
  const auto n = w.size();
  return Eigen::MatrixXd::Identity(n, n) - 2.0 * w * w.transpose();
}

/// A = Q V Q' with Q = H3 H2 H1, formed densely.
inline Eigen::MatrixXd dense_matrix(const zigzag::QuadraticProblem& p) {
  const int n = p.dim();
  Eigen::MatrixXd V = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) V(i, i) = p.spectrum()[i];
  if (p.is_diagonal()) return V;
  const auto& w = p.reflections();
  const Eigen::MatrixXd Q = householder(w[2]) * householder(w[1]) * householder(w[0]);
  return Q * V * Q.transpose();
}

/// Steepest descent on diag{l1, l2}, b = 0, written directly on the two
/// gradient components. Returns the iteration count at which
/// ||g_k|| <= eps ||g_0||.
inline int sd_iterations_2d(double l1, double l2, double x1, double x2, double eps, int max_iter) {
  double g1 = l1 * x1;
  double g2 = l2 * x2;
  const double g0 = std::sqrt(g1 * g1 + g2 * g2);
  for (int k = 0; k < max_iter; ++k) {
    if (std::sqrt(g1 * g1 + g2 * g2) <= eps * g0) return k;
    const double a = (g1 * g1 + g2 * g2) / (l1 * g1 * g1 + l2 * g2 * g2);
    g1 *= 1.0 - a * l1;
    g2 *= 1.0 - a * l2;
  }
  return std::sqrt(g1 * g1 + g2 * g2) <= eps * g0 ? max_iter : -1;
}

/// Reciprocal eigenvalues of [[a, b], [b, c]] from the characteristic
/// polynomial x^2 - (a + c) x + (ac - b^2).
inline std::pair<double, double> recip_eigs(double a, double b, double c) {
  Eigen::Matrix2d H;
  H << a, b, b, c;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(H);
  return {1.0 / es.eigenvalues()[1], 1.0 / es.eigenvalues()[0]};
}

/// Psi-weighted variance by a plain loop.
inline double weighted_variance(const std::vector<double>& lambda, const std::vector<double>& psi,
                                const std::vector<double>& p) {
  double w = 0.0;
  double mean = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    w += psi[i] * p[i];
    mean += psi[i] * p[i] * lambda[i];
  }
  mean /= w;
  double var = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) var += psi[i] * p[i] * (lambda[i] - mean) * (lambda[i] - mean);
  return var / w;
}

}  // namespace oracle
