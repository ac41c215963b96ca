#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "l1rls/core.hpp"
#include "l1rls/stats.hpp"

namespace l1rls {

namespace detail {

// Exactly minimizes phi(g) = 0.5 A g^2 + B g + sum_k mu_k (|x_k + g d_k| - |x_k|)
// on [0, 1]. The l1 part is piecewise linear with kinks at g_k = -x_k / d_k;
// on each segment the objective is a smooth quadratic, so the global minimum
// is attained at a segment endpoint or an interior stationary point. Ties go
// to the smaller g (candidates are scanned in increasing order with strict <).
inline double exact_linesearch_scalars(double A, double B, const Vector& x, const Vector& d,
                                       const Vector& mu) {
  const int K = static_cast<int>(x.size());

  std::vector<double> knots;
  knots.reserve(K + 2);
  knots.push_back(0.0);
  for (int k = 0; k < K; ++k) {
    if (d[k] != 0.0) {
      const double g = -x[k] / d[k];
      if (g > 0.0 && g < 1.0) knots.push_back(g);
    }
  }
  knots.push_back(1.0);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  const auto phi = [&](double g) {
    double l1 = 0.0;
    for (int k = 0; k < K; ++k) l1 += mu[k] * (std::abs(x[k] + g * d[k]) - std::abs(x[k]));
    return 0.5 * A * g * g + B * g + l1;
  };

  double best_g = 0.0;
  double best_phi = 0.0;  // phi(0) = 0
  const auto consider = [&](double g) {
    const double v = phi(g);
    if (v < best_phi) {
      best_phi = v;
      best_g = g;
    }
  };

  Vector signed_d(K);
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double lo = knots[i], hi = knots[i + 1];
    const double mid = 0.5 * (lo + hi);
    for (int k = 0; k < K; ++k) {
      const double v = x[k] + mid * d[k];
      signed_d[k] = v > 0.0 ? d[k] : (v < 0.0 ? -d[k] : 0.0);
    }
    const double slope = mu.dot(signed_d);
    if (A > 0.0) {
      const double g_star = -(B + slope) / A;
      if (g_star > lo && g_star < hi) consider(g_star);
    }
    consider(hi);
  }
  return best_g;
}

}  // namespace detail

/// Minimization rule (exact line search): the stepsize that minimizes
/// L^(t)(x + g (x_hat - x)) over g in [0, 1], computed exactly from the
/// breakpoint structure of the l1 term. d == 0 returns 0.
inline double exact_linesearch(const SufficientStats& stats, const Vector& x,
                               const Vector& xhat, const Vector& mu) {
  if (x.size() != stats.dimension() || xhat.size() != stats.dimension() ||
      mu.size() != stats.dimension())
    throw std::invalid_argument("exact_linesearch: dimension mismatch");
  const Vector d = xhat - x;
  if (d.isZero(0.0)) return 0.0;
  const Vector q = stats.G() * x;
  const Vector Gxhat = stats.G() * xhat;
  const double A = d.dot(Gxhat - q);
  const double B = d.dot(q - stats.b());
  return detail::exact_linesearch_scalars(A, B, x, d, mu);
}

inline double exact_linesearch(const SufficientStats& stats, const Vector& x,
                               const Vector& xhat, double mu) {
  return exact_linesearch(stats, x, xhat, Vector::Constant(x.size(), mu));
}

}  // namespace l1rls
