#pragma once

#include <Eigen/Eigenvalues>

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "l1rls/core.hpp"
#include "l1rls/signal_model.hpp"

namespace l1rls {

/// Running sample averages G^(t), b^(t) with the recursive update
///   G^(t) = ((t-1) beta G^(t-1) + sum_n g_n g_n') / t
/// (beta = 1 reproduces the plain time average; beta < 1 is the
/// forgetting-factor variant). Single-writer; G is re-symmetrized after each
/// update to stop floating-point drift.
class SufficientStats {
 public:
  explicit SufficientStats(int K, double beta = 1.0)
      : G_(Matrix::Zero(K, K)), b_(Vector::Zero(K)), t_(0), beta_(beta) {
    if (K < 1) throw std::invalid_argument("SufficientStats: K must be >= 1");
    if (!(beta >= 0.0 && beta <= 1.0))
      throw std::invalid_argument("SufficientStats: beta must be in [0, 1]");
  }

  // Direct construction, used by snapshot restore and tests that pin G, b.
  SufficientStats(Matrix G, Vector b, long t = 1, double beta = 1.0)
      : G_(std::move(G)), b_(std::move(b)), t_(t), beta_(beta) {
    if (G_.rows() != G_.cols() || G_.rows() != b_.size())
      throw std::invalid_argument("SufficientStats: G/b dimension mismatch");
  }

  int dimension() const { return static_cast<int>(b_.size()); }
  const Matrix& G() const { return G_; }
  const Vector& b() const { return b_; }
  long t() const { return t_; }
  double beta() const { return beta_; }

  /// Absorb one instance (all N samples of time t_ + 1).
  void update(const std::vector<RegressionSample>& samples) {
    if (samples.empty()) throw std::invalid_argument("update: no samples");
    const long t = t_ + 1;
    Matrix S = Matrix::Zero(dimension(), dimension());
    Vector s = Vector::Zero(dimension());
    for (const auto& sample : samples) {
      if (sample.g.size() != dimension())
        throw std::invalid_argument("update: sample dimension mismatch");
      if (sample.time != t)
        throw std::invalid_argument("update: sample time is not consecutive");
      S.noalias() += sample.g * sample.g.transpose();
      s.noalias() += sample.y * sample.g;
    }
    const double carry = static_cast<double>(t - 1) * beta_;
    G_ = (carry * G_ + S) / static_cast<double>(t);
    b_ = (carry * b_ + s) / static_cast<double>(t);
    G_ = 0.5 * (G_ + G_.transpose().eval());
    t_ = t;
  }

  /// Largest eigenvalue of G (full symmetric eigensolve; diagnostics only).
  double max_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(G_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
  }

  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(G_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

 private:
  Matrix G_;
  Vector b_;
  long t_;
  double beta_;
};

/// Sensor-local partials G_n, b_n of the fusion-free architecture; the sum
/// over sensors reproduces the centralized stats.
class NodePartialStats {
 public:
  NodePartialStats(int sensor_id, int K, double beta = 1.0)
      : sensor_id_(sensor_id), stats_(K, beta) {}

  int sensor_id() const { return sensor_id_; }
  const Matrix& G() const { return stats_.G(); }
  const Vector& b() const { return stats_.b(); }
  long t() const { return stats_.t(); }

  /// Per-node analogue of SufficientStats::update with N = 1.
  void update(const RegressionSample& sample) {
    if (sample.sensor_id != sensor_id_)
      throw std::invalid_argument("update_partial: sample belongs to another sensor");
    stats_.update({sample});
  }

 private:
  int sensor_id_;
  SufficientStats stats_;
};

// -- snapshot / restore ------------------------------------------------------
// Text header line "K t beta" followed by K*K + K raw little-endian doubles
// (G row-major, then b).

inline void save_stats(const SufficientStats& stats, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_stats: cannot open " + path);
  out << stats.dimension() << ' ' << stats.t() << ' ' << format_double(stats.beta()) << '\n';
  const int K = stats.dimension();
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j) {
      const double v = stats.G()(i, j);
      out.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
  for (int i = 0; i < K; ++i) {
    const double v = stats.b()(i);
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
  }
  if (!out) throw std::runtime_error("save_stats: write failed for " + path);
}

inline SufficientStats load_stats(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_stats: cannot open " + path);
  std::string header;
  std::getline(in, header);
  std::istringstream hs(header);
  int K = 0;
  long t = 0;
  double beta = 0.0;
  if (!(hs >> K >> t >> beta)) throw std::runtime_error("load_stats: bad header in " + path);
  Matrix G(K, K);
  Vector b(K);
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j) in.read(reinterpret_cast<char*>(&G(i, j)), sizeof(double));
  for (int i = 0; i < K; ++i) in.read(reinterpret_cast<char*>(&b(i)), sizeof(double));
  if (!in) throw std::runtime_error("load_stats: truncated payload in " + path);
  return SufficientStats(std::move(G), std::move(b), t, beta);
}

}  // namespace l1rls
