// Test-only reference implementations, kept independent of the library code
// paths they audit.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "l1rls/core.hpp"

namespace testsupport {

using l1rls::Matrix;
using l1rls::Vector;

inline Matrix random_psd(int K, std::mt19937_64& gen, double ridge = 0.0) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix A(K, K);
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j) A(i, j) = normal(gen);
  Matrix G = A.transpose() * A / static_cast<double>(K);
  G.diagonal().array() += ridge;
  return 0.5 * (G + G.transpose().eval());
}

inline Vector random_vector(int K, std::mt19937_64& gen) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(K);
  for (int i = 0; i < K; ++i) v[i] = normal(gen);
  return v;
}

/// Largest eigenvalue by plain power iteration (independent of Eigen's
/// symmetric eigensolver).
inline double power_iteration_max_eig(const Matrix& G, int iterations = 20000) {
  Vector v = Vector::Ones(G.rows());
  v.normalize();
  double lambda = 0.0;
  for (int i = 0; i < iterations; ++i) {
    Vector w = G * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    lambda = v.dot(G * v);
  }
  return lambda;
}

/// Brute-force lasso minimization by subgradient descent with a diminishing
/// step; slow but has no shared machinery with coordinate descent.
inline Vector subgradient_lasso(const Matrix& G, const Vector& b, double mu, long iterations) {
  Vector x = Vector::Zero(b.size());
  Vector best_x = x;
  double best_obj = l1rls::evaluate_objective(G, b, mu, x);
  const double lipschitz = power_iteration_max_eig(G, 2000) + 1.0;
  for (long i = 1; i <= iterations; ++i) {
    Vector sub = G * x - b;
    for (int k = 0; k < x.size(); ++k)
      sub[k] += x[k] > 0.0 ? mu : (x[k] < 0.0 ? -mu : 0.0);
    x -= (1.0 / (lipschitz * std::sqrt(static_cast<double>(i)))) * sub;
    const double obj = l1rls::evaluate_objective(G, b, mu, x);
    if (obj < best_obj) {
      best_obj = obj;
      best_x = x;
    }
  }
  return best_x;
}

}  // namespace testsupport
