#pragma once

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

#include "l1rls/core.hpp"
#include "l1rls/estimator.hpp"
#include "l1rls/linesearch.hpp"
#include "l1rls/stats.hpp"

namespace l1rls {

struct OracleConfig {
  double objective_tol = 1e-12;       // relative objective-change stopping threshold
  int max_sweeps = 10000;             // cap on coordinate sweeps
  double ridge_eps_numerator = 1e-4;  // RLS ridge fallback, divided by t

  void validate() const {
    if (!(objective_tol > 0.0)) throw std::invalid_argument("OracleConfig: tol must be > 0");
    if (max_sweeps < 1) throw std::invalid_argument("OracleConfig: max_sweeps must be >= 1");
  }
};

/// Online sequential baseline: at instance t only element k = mod(t-1, K) + 1
/// is replaced by its exact scalar minimizer S_mu(r_k) / G_kk (no proximal
/// term, no stepsize, no reset).
inline void sequential_step(EstimatorState& state, const SufficientStats& stats, double mu,
                            double c_floor = kDefaultCFloor) {
  if (stats.t() != state.t)
    throw std::invalid_argument("sequential_step: stats instance counter mismatch");
  const int K = stats.dimension();
  if (state.x.size() != K) throw std::invalid_argument("sequential_step: dimension mismatch");
  const int k = static_cast<int>((state.t - 1) % K);
  const double Gkk = stats.G()(k, k);
  if (!(Gkk >= c_floor))
    throw std::runtime_error("sequential_step: G_kk below c_floor at k=" + std::to_string(k));
  const double r_k = stats.b()[k] - (stats.G().row(k).dot(state.x) - Gkk * state.x[k]);
  state.x[k] = soft_threshold(mu, r_k) / Gkk;
  state.t += 1;
}

/// Classical RLS estimate argmin 0.5 x'Gx - b'x. Numerically singular G
/// (smallest eigenvalue < 1e-10 lambda_max) falls back to the ridge system
/// (G + eps_t I) x = b with eps_t = ridge_eps_numerator / t; otherwise the
/// pseudo-inverse solution G^+ b.
inline Vector rls_solve(const SufficientStats& stats, const OracleConfig& cfg = {}) {
  cfg.validate();
  const int K = stats.dimension();
  Eigen::SelfAdjointEigenSolver<Matrix> es(stats.G());
  const Vector& evals = es.eigenvalues();
  const double lambda_max = evals.maxCoeff();
  const double lambda_min = evals.minCoeff();
  if (lambda_min < 1e-10 * lambda_max) {
    const long t = std::max<long>(stats.t(), 1);
    const double eps = cfg.ridge_eps_numerator / static_cast<double>(t);
    Matrix ridged = stats.G();
    ridged.diagonal().array() += eps;
    return ridged.ldlt().solve(stats.b());
  }
  Vector inv_evals(K);
  for (int i = 0; i < K; ++i) inv_evals[i] = evals[i] > 0.0 ? 1.0 / evals[i] : 0.0;
  return es.eigenvectors() * (inv_evals.asDiagonal() * (es.eigenvectors().transpose() * stats.b()));
}

struct LassoResult {
  Vector x;
  int sweeps = 0;
  bool converged = false;
  double last_relative_change = 0.0;
};

/// High-precision batch LASSO via cyclic coordinate minimization; each
/// coordinate update is the exact scalar soft-threshold minimizer. Stops when
/// the objective change falls below objective_tol * (1 + |L|). Deterministic
/// given the warm start; non-convergence within max_sweeps is reported, not
/// thrown.
inline LassoResult lasso_oracle(const SufficientStats& stats, const Vector& mu,
                                const OracleConfig& cfg = {}, const Vector* warm_start = nullptr) {
  cfg.validate();
  const int K = stats.dimension();
  if (mu.size() != K) throw std::invalid_argument("lasso_oracle: mu dimension mismatch");
  if ((mu.array() < 0.0).any()) throw std::invalid_argument("lasso_oracle: mu must be >= 0");
  const Matrix& G = stats.G();
  const Vector& b = stats.b();

  LassoResult res;
  res.x = warm_start ? *warm_start : Vector::Zero(K);
  if (warm_start && warm_start->size() != K)
    throw std::invalid_argument("lasso_oracle: warm start dimension mismatch");

  Vector q = G * res.x;  // maintained q = G x
  double obj = 0.5 * res.x.dot(q) - b.dot(res.x) + weighted_l1(mu, res.x);
  for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    for (int k = 0; k < K; ++k) {
      const double Gkk = G(k, k);
      const double r_k = b[k] - (q[k] - Gkk * res.x[k]);
      double next;
      if (Gkk > 0.0) {
        next = soft_threshold(mu[k], r_k) / Gkk;
      } else {
        // Degenerate coordinate: the scalar problem is linear + l1. Inside
        // the dead zone 0 is a minimizer; otherwise it is unbounded and we
        // leave the coordinate untouched.
        next = std::abs(r_k) <= mu[k] ? 0.0 : res.x[k];
      }
      const double delta = next - res.x[k];
      if (delta != 0.0) {
        q.noalias() += delta * G.col(k);
        res.x[k] = next;
      }
    }
    const double new_obj = 0.5 * res.x.dot(q) - b.dot(res.x) + weighted_l1(mu, res.x);
    res.sweeps = sweep;
    res.last_relative_change = std::abs(obj - new_obj) / (1.0 + std::abs(new_obj));
    obj = new_obj;
    if (res.last_relative_change <= cfg.objective_tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

inline LassoResult lasso_oracle(const SufficientStats& stats, double mu,
                                const OracleConfig& cfg = {}, const Vector* warm_start = nullptr) {
  return lasso_oracle(stats, Vector::Constant(stats.dimension(), mu), cfg, warm_start);
}

}  // namespace l1rls
