#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "l1rls/core.hpp"
#include "l1rls/linesearch.hpp"
#include "l1rls/stats.hpp"

namespace l1rls {

constexpr double kDefaultCFloor = 1e-8;
constexpr double kDefaultProximalWeight = 1e-6;

/// Sparsity-gain schedule mu^(t) = gain / t^exponent, optionally combined
/// with the time- and norm-weighted factor W (weighted mode, knot ratio a).
struct RegularizationSchedule {
  enum class Kind { plain, weighted };
  Kind kind = Kind::plain;
  double gain = 1.0;
  double exponent = 1.0;
  double a = 2.0;  // weighted mode only, > 1

  double mu(long t) const {
    if (t < 1) throw std::invalid_argument("RegularizationSchedule: t must be >= 1");
    return gain / std::pow(static_cast<double>(t), exponent);
  }

  void validate() const {
    if (!(gain > 0.0)) throw std::invalid_argument("schedule: gain must be > 0");
    if (!(exponent > 0.0)) throw std::invalid_argument("schedule: exponent must be > 0");
    if (kind == Kind::weighted && !(a > 1.0))
      throw std::invalid_argument("schedule: weighted mode needs a > 1");
  }
};

/// Piecewise-linear weight factor W_mu(x): 1 below mu, 0 above a*mu, linear
/// in between (continuous at both knots).
inline double weight_factor(double mu, double a, double xabs) {
  if (!(mu > 0.0)) throw std::invalid_argument("weight_factor: mu must be > 0");
  if (!(a > 1.0)) throw std::invalid_argument("weight_factor: a must be > 1");
  if (xabs < 0.0) throw std::invalid_argument("weight_factor: xabs must be >= 0");
  if (xabs <= mu) return 1.0;
  if (xabs >= a * mu) return 0.0;
  return (a * mu - xabs) / ((a - 1.0) * mu);
}

/// Per-element regularization gains consumed by the best response and the
/// stepsize. Plain mode broadcasts mu^(t); weighted mode scales it by
/// W_{mu^(t)}(|x_rls,k|) and therefore needs the current RLS estimate.
inline Vector effective_regularizer(const RegularizationSchedule& schedule, long t, int K,
                                    const Vector* rls_estimate = nullptr) {
  schedule.validate();
  const double mu = schedule.mu(t);
  if (schedule.kind == RegularizationSchedule::Kind::plain) return Vector::Constant(K, mu);
  if (rls_estimate == nullptr)
    throw std::invalid_argument("effective_regularizer: weighted mode needs an RLS estimate");
  if (rls_estimate->size() != K)
    throw std::invalid_argument("effective_regularizer: RLS estimate has wrong length");
  Vector out(K);
  for (int k = 0; k < K; ++k)
    out[k] = mu * weight_factor(mu, schedule.a, std::abs((*rls_estimate)[k]));
  return out;
}

/// Proximal weights c_k^(t) >= 0; constant by default, overridable by a rule.
struct ProximalWeightRule {
  double constant = kDefaultProximalWeight;
  std::function<Vector(long t, int K)> custom;

  Vector at(long t, int K) const {
    Vector c = custom ? custom(t, K) : Vector::Constant(K, constant);
    if (c.size() != K) throw std::invalid_argument("proximal weights: wrong length");
    if ((c.array() < 0.0).any())
      throw std::invalid_argument("proximal weights: must be >= 0");
    return c;
  }
};

enum class StepsizeRule { simplified, exact_oracle };

struct EstimatorConfig {
  RegularizationSchedule schedule;
  ProximalWeightRule proximal;
  bool nonnegative = false;
  StepsizeRule stepsize_rule = StepsizeRule::simplified;
  double c_floor = kDefaultCFloor;
};

struct EstimatorState {
  Vector x;
  long t = 1;

  explicit EstimatorState(int K) : x(Vector::Zero(K)) {}
};

/// Pull-based per-step diagnostics; the hot loop does no I/O.
struct StepDiagnostics {
  long t = 0;
  double gamma = 0.0;
  double direction_norm = 0.0;  // ||x_hat - x||_2
  double loss_before = 0.0;     // L^(t)(x^(t))
  double loss_tentative = 0.0;  // L^(t)(x_tilde)
  double loss_after = 0.0;      // L^(t)(x^(t+1))
  bool reset_taken = false;
};

inline std::string diagnostics_csv_header() {
  return "t,gamma,direction_norm,loss_before,loss_after,reset_taken";
}

inline std::string to_csv_row(const StepDiagnostics& d) {
  return std::to_string(d.t) + ',' + format_double(d.gamma) + ',' +
         format_double(d.direction_norm) + ',' + format_double(d.loss_before) + ',' +
         format_double(d.loss_after) + ',' + (d.reset_taken ? "1" : "0");
}

/// One element of the Jacobi best response, reading only the frozen x.
inline double best_response_element(const Matrix& G, const Vector& b, const Vector& x,
                                    double mu_k, double c_k, bool nonnegative, double c_floor,
                                    int k) {
  const double denom = G(k, k) + c_k;
  if (!(denom >= c_floor))
    throw std::runtime_error("best_response: G_kk + c_k below c_floor at k=" +
                             std::to_string(k) + " (A5 surrogate violated)");
  const double r_k = b[k] - (G.row(k).dot(x) - G(k, k) * x[k]);
  const double z = r_k + c_k * x[k];
  if (nonnegative) return std::max(z - mu_k, 0.0) / denom;
  return soft_threshold(mu_k, z) / denom;
}

/// Parallel best response: every element minimizes its own scalar problem at
/// the frozen iterate (Jacobi semantics; output independent of element order).
inline Vector best_response(const SufficientStats& stats, const Vector& x, const Vector& mu,
                            const Vector& c, bool nonnegative = false,
                            double c_floor = kDefaultCFloor) {
  const int K = stats.dimension();
  if (x.size() != K || mu.size() != K || c.size() != K)
    throw std::invalid_argument("best_response: dimension mismatch");
  Vector xhat(K);
  for (int k = 0; k < K; ++k)
    xhat[k] = best_response_element(stats.G(), stats.b(), x, mu[k], c[k], nonnegative,
                                    c_floor, k);
  return xhat;
}

inline Vector best_response(const SufficientStats& stats, const Vector& x, double mu,
                            double c = 0.0, bool nonnegative = false,
                            double c_floor = kDefaultCFloor) {
  const int K = stats.dimension();
  return best_response(stats, x, Vector::Constant(K, mu), Vector::Constant(K, c), nonnegative,
                       c_floor);
}

namespace detail {

// Closed-form minimizer of the upper-bound objective
//   0.5 A g^2 + (B + l1_slope) g  on [0, 1],
// where A = d'Gd, B = (Gx-b)'d. A == 0 (including d == 0) maps to 0.
inline double simplified_gamma_from_scalars(double A, double B, double l1_slope) {
  if (A <= 0.0) return 0.0;
  return clamp01(-(B + l1_slope) / A);
}

}  // namespace detail

/// Simplified minimization rule: the l1 term is linearized between the
/// endpoints, leaving a scalar quadratic with a closed-form minimizer over
/// [0, 1]. Nonnegative mode uses the (Gx - b + mu)'d numerator, which is the
/// exact line search there.
inline double stepsize_simplified(const SufficientStats& stats, const Vector& x,
                                  const Vector& xhat, const Vector& mu,
                                  bool nonnegative = false) {
  const Vector d = xhat - x;
  const Vector q = stats.G() * x;
  const Vector Gxhat = stats.G() * xhat;
  const double A = d.dot(Gxhat - q);
  const double B = d.dot(q - stats.b());
  const double l1_slope =
      nonnegative ? mu.dot(d) : mu.dot(xhat.cwiseAbs() - x.cwiseAbs());
  return detail::simplified_gamma_from_scalars(A, B, l1_slope);
}

inline double stepsize_simplified(const SufficientStats& stats, const Vector& x,
                                  const Vector& xhat, double mu, bool nonnegative = false) {
  return stepsize_simplified(stats, x, xhat, Vector::Constant(x.size(), mu), nonnegative);
}

inline double evaluate_objective(const SufficientStats& stats, const Vector& mu,
                                 const Vector& x) {
  return evaluate_objective(stats.G(), stats.b(), mu, x);
}

inline double evaluate_objective(const SufficientStats& stats, double mu, const Vector& x) {
  return evaluate_objective(stats.G(), stats.b(), mu, x);
}

/// Dynamic reset: keep x_tilde only if it lies in the zero-sublevel set of
/// L^(t), otherwise fall back to the zero vector (whose loss is exactly 0).
inline Vector reset_step(const SufficientStats& stats, const Vector& mu, const Vector& x_tilde) {
  if (evaluate_objective(stats, mu, x_tilde) <= 0.0) return x_tilde;
  return Vector::Zero(x_tilde.size());
}

inline Vector reset_step(const SufficientStats& stats, double mu, const Vector& x_tilde) {
  return reset_step(stats, Vector::Constant(x_tilde.size(), mu), x_tilde);
}

/// One full instance of the online parallel algorithm: best response,
/// stepsize, intermediate update, dynamic reset. Mutates state in place and
/// returns the step's diagnostics.
inline StepDiagnostics step(EstimatorState& state, const SufficientStats& stats,
                            const EstimatorConfig& cfg, const Vector* rls_estimate = nullptr) {
  if (stats.t() != state.t)
    throw std::invalid_argument("step: stats instance counter does not match state");
  const int K = stats.dimension();
  if (state.x.size() != K) throw std::invalid_argument("step: state dimension mismatch");

  const long t = state.t;
  const Vector mu = effective_regularizer(cfg.schedule, t, K, rls_estimate);
  const Vector c = cfg.proximal.at(t, K);

  const Vector xhat = best_response(stats, state.x, mu, c, cfg.nonnegative, cfg.c_floor);
  const Vector d = xhat - state.x;
  const Vector q = stats.G() * state.x;
  const Vector Gxhat = stats.G() * xhat;

  double gamma;
  if (cfg.stepsize_rule == StepsizeRule::exact_oracle) {
    gamma = exact_linesearch(stats, state.x, xhat, mu);
  } else {
    const double A = d.dot(Gxhat - q);
    const double B = d.dot(q - stats.b());
    const double l1_slope =
        cfg.nonnegative ? mu.dot(d) : mu.dot(xhat.cwiseAbs() - state.x.cwiseAbs());
    gamma = detail::simplified_gamma_from_scalars(A, B, l1_slope);
  }

  const Vector x_tilde = state.x + gamma * d;
  const Vector G_x_tilde = q + gamma * (Gxhat - q);
  const double loss_before = 0.5 * state.x.dot(q) - stats.b().dot(state.x) +
                             weighted_l1(mu, state.x);
  const double loss_tentative = 0.5 * x_tilde.dot(G_x_tilde) - stats.b().dot(x_tilde) +
                                weighted_l1(mu, x_tilde);

  StepDiagnostics diag;
  diag.t = t;
  diag.gamma = gamma;
  diag.direction_norm = d.norm();
  diag.loss_before = loss_before;
  diag.loss_tentative = loss_tentative;
  if (loss_tentative <= 0.0) {
    state.x = x_tilde;
    diag.loss_after = loss_tentative;
    diag.reset_taken = false;
  } else {
    state.x = Vector::Zero(K);
    diag.loss_after = 0.0;
    diag.reset_taken = true;
  }
  state.t = t + 1;
  return diag;
}

}  // namespace l1rls
