#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace l1rls {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline double clamp01(double x) { return std::min(std::max(x, 0.0), 1.0); }

/// Soft-thresholding operator S_a(b) = (b-a)+ - (-b-a)+.
inline double soft_threshold(double a, double b) {
  if (a < 0.0) throw std::invalid_argument("soft_threshold: threshold must be >= 0");
  return std::max(b - a, 0.0) - std::max(-b - a, 0.0);
}

/// Weighted l1 norm: sum_k mu_k |x_k|.
inline double weighted_l1(const Vector& mu, const Vector& x) {
  if (mu.size() != x.size()) throw std::invalid_argument("weighted_l1: size mismatch");
  return mu.dot(x.cwiseAbs());
}

/// Regularized sample-average loss 0.5 x'Gx - b'x + sum_k mu_k |x_k|.
inline double evaluate_objective(const Matrix& G, const Vector& b, const Vector& mu,
                                 const Vector& x) {
  if (G.rows() != x.size() || b.size() != x.size())
    throw std::invalid_argument("evaluate_objective: dimension mismatch");
  return 0.5 * x.dot(G * x) - b.dot(x) + weighted_l1(mu, x);
}

inline double evaluate_objective(const Matrix& G, const Vector& b, double mu, const Vector& x) {
  return evaluate_objective(G, b, Vector::Constant(x.size(), mu), x);
}

/// Golden-section search for a unimodal scalar function on [lo, hi].
/// Returns the abscissa of the bracketed minimum once hi - lo <= resolution.
template <typename F>
double golden_section_minimize(F&& f, double lo, double hi, double resolution) {
  constexpr double invphi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > resolution) {
    if (f1 <= f2) {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

/// Shortest-round-trip decimal formatting, used everywhere CSV is written so
/// identical doubles always produce identical bytes.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

}  // namespace l1rls
