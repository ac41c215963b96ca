#pragma once

#include <exception>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "l1rls/baselines.hpp"
#include "l1rls/estimator.hpp"
#include "l1rls/signal_model.hpp"
#include "l1rls/stats.hpp"

namespace l1rls {

/// The only data a node exposes to the network. Phase 1 carries
/// (d(G_n), G_n x - b_n), phase 2 carries (G_n x, G_n x_hat); 2K reals each,
/// 4K per node per instance.
struct NodeMessage {
  int phase = 1;
  int sensor_id = 1;
  Vector payload;
};

struct SignalingLedger {
  enum class Mode { fusion_center, fusion_free };
  struct Entry {
    long t;
    int node;
    long phase1_reals;
    long phase2_reals;
  };

  Mode mode = Mode::fusion_free;
  std::vector<Entry> entries;

  long total_reals() const {
    long total = 0;
    for (const auto& e : entries) total += e.phase1_reals + e.phase2_reals;
    return total;
  }

  void write_csv(std::ostream& out) const {
    out << "t,node,phase1_reals,phase2_reals,total_reals\n";
    for (const auto& e : entries)
      out << e.t << ',' << e.node << ',' << e.phase1_reals << ',' << e.phase2_reals << ','
          << (e.phase1_reals + e.phase2_reals) << '\n';
  }
};

struct DistNetConfig {
  EstimatorConfig estimator;
  double forgetting = 1.0;
  bool threaded = false;
  OracleConfig oracle;  // weighted schedules in fusion-center mode
};

struct FusionCenterResult {
  std::vector<Vector> trajectory;  // x^(t+1) after instance t
  std::vector<StepDiagnostics> diagnostics;
  SignalingLedger ledger;
};

struct FusionFreeResult {
  std::vector<std::vector<Vector>> node_trajectories;  // [node][t-1] = x^(t+1)
  std::vector<Vector> tentative;                       // x_tilde per instance
  std::vector<double> reconstructed_loss;              // L^(t)(x_tilde) from aggregates
  SignalingLedger ledger;
};

namespace detail {

inline void for_each_node(bool threaded, int N, const std::function<void(int)>& fn) {
  if (!threaded) {
    for (int i = 0; i < N; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(N);
  std::vector<std::thread> workers;
  workers.reserve(N);
  for (int i = 0; i < N; ++i)
    workers.emplace_back([&, i] {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    });
  for (auto& w : workers) w.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace detail

/// One sensor of the fusion-free architecture. It owns only its local
/// partials and the shared iterate; everything it learns about the rest of
/// the network arrives as summed NodeMessage payloads.
class FusionFreeNode {
 public:
  FusionFreeNode(int sensor_id, int K, const EstimatorConfig& cfg, double forgetting)
      : partial_(sensor_id, K, forgetting), cfg_(cfg), x_(Vector::Zero(K)), t_(1) {}

  int sensor_id() const { return partial_.sensor_id(); }
  const Vector& estimate() const { return x_; }
  long t() const { return t_; }

  void observe(const RegressionSample& sample) {
    partial_.update(sample);  // rejects samples from other sensors
    Gx_local_ = partial_.G() * x_;
  }

  NodeMessage phase1_message() const {
    const int K = static_cast<int>(x_.size());
    NodeMessage msg;
    msg.phase = 1;
    msg.sensor_id = sensor_id();
    msg.payload.resize(2 * K);
    msg.payload.head(K) = partial_.G().diagonal();
    msg.payload.tail(K) = Gx_local_ - partial_.b();
    return msg;
  }

  /// Receives the phase-1 sums: d(G) and Gx - b. Forms the best response.
  void absorb_phase1(const Vector& diag_sum, const Vector& grad_sum) {
    const int K = static_cast<int>(x_.size());
    mu_ = effective_regularizer(cfg_.schedule, t_, K);
    const Vector c = cfg_.proximal.at(t_, K);
    grad_sum_ = grad_sum;
    const Vector r = diag_sum.cwiseProduct(x_) - grad_sum;  // b - sum_{j!=k} G_kj x_j
    xhat_.resize(K);
    for (int k = 0; k < K; ++k) {
      const double denom = diag_sum[k] + c[k];
      if (!(denom >= cfg_.c_floor))
        throw std::runtime_error("fusion-free: G_kk + c_k below c_floor (A5 violated)");
      const double z = r[k] + c[k] * x_[k];
      xhat_[k] = cfg_.nonnegative ? std::max(z - mu_[k], 0.0) / denom
                                  : soft_threshold(mu_[k], z) / denom;
    }
    Gxhat_local_ = partial_.G() * xhat_;
  }

  NodeMessage phase2_message() const {
    const int K = static_cast<int>(x_.size());
    NodeMessage msg;
    msg.phase = 2;
    msg.sensor_id = sensor_id();
    msg.payload.resize(2 * K);
    msg.payload.head(K) = Gx_local_;
    msg.payload.tail(K) = Gxhat_local_;
    return msg;
  }

  /// Receives the phase-2 sums Gx and Gx_hat, then finishes the instance:
  /// stepsize, intermediate update, loss reconstruction, dynamic reset.
  /// Returns (L(x_tilde), x_tilde) for ledgerless diagnostics.
  std::pair<double, Vector> absorb_phase2(const Vector& Gx_sum, const Vector& Gxhat_sum) {
    const Vector d = xhat_ - x_;
    const double A = d.dot(Gxhat_sum - Gx_sum);
    const double B = grad_sum_.dot(d);
    double gamma;
    if (cfg_.stepsize_rule == StepsizeRule::exact_oracle) {
      gamma = d.isZero(0.0) ? 0.0 : detail::exact_linesearch_scalars(A, B, x_, d, mu_);
    } else {
      const double l1_slope =
          cfg_.nonnegative ? mu_.dot(d) : mu_.dot(xhat_.cwiseAbs() - x_.cwiseAbs());
      gamma = detail::simplified_gamma_from_scalars(A, B, l1_slope);
    }

    const Vector x_tilde = x_ + gamma * d;
    // L(x_tilde) from exchanged aggregates only: G x_tilde - 2b =
    // 2(Gx - b) - Gx + gamma (Gx_hat - Gx).
    const Vector combo = 2.0 * grad_sum_ - Gx_sum + gamma * (Gxhat_sum - Gx_sum);
    const double loss_tilde = 0.5 * x_tilde.dot(combo) + weighted_l1(mu_, x_tilde);

    x_ = loss_tilde <= 0.0 ? x_tilde : Vector::Zero(x_.size());
    t_ += 1;
    return {loss_tilde, x_tilde};
  }

 private:
  NodePartialStats partial_;
  EstimatorConfig cfg_;
  Vector x_;
  long t_;
  Vector mu_, xhat_, Gx_local_, Gxhat_local_, grad_sum_;
};

/// Fusion-center architecture: sensors ship raw (g_n, y_n) pairs up (K+1
/// reals), the center runs the plain estimator and broadcasts x^(t+1) back
/// (K reals). Numerically this is the single-process run plus accounting.
inline FusionCenterResult run_fusion_center(const ScenarioConfig& scenario,
                                            const DistNetConfig& cfg, long T) {
  scenario.validate();
  cfg.estimator.schedule.validate();
  FusionCenterResult result;
  result.ledger.mode = SignalingLedger::Mode::fusion_center;

  ScenarioRng rng(scenario.seed);
  SparseSignal signal = generate_signal(scenario, rng.signal_stream());
  SufficientStats stats(scenario.K, cfg.forgetting);
  EstimatorState state(scenario.K);

  const bool weighted = cfg.estimator.schedule.kind == RegularizationSchedule::Kind::weighted;
  for (long t = 1; t <= T; ++t) {
    const auto samples = generate_instance(signal, scenario, t, rng);
    for (int n = 1; n <= scenario.N; ++n)
      result.ledger.entries.push_back({t, n, scenario.K + 1, scenario.K});
    stats.update(samples);
    Vector x_rls;
    if (weighted) x_rls = rls_solve(stats, cfg.oracle);
    result.diagnostics.push_back(step(state, stats, cfg.estimator, weighted ? &x_rls : nullptr));
    result.trajectory.push_back(state.x);
    if (scenario.time_varying)
      signal = evolve_signal(signal, scenario.time_varying->alpha, rng.evolve_stream(t));
  }
  return result;
}

/// Fusion-free architecture: nodes hold (G_n, b_n) and exchange two 2K-real
/// aggregate sums per instance (exact-sum stand-in for consensus). Reductions
/// run in fixed node order, so sequential and threaded modes are bitwise
/// identical; any cross-node divergence is a hard failure.
inline FusionFreeResult run_fusion_free(const ScenarioConfig& scenario, const DistNetConfig& cfg,
                                        long T) {
  scenario.validate();
  cfg.estimator.schedule.validate();
  if (cfg.estimator.schedule.kind == RegularizationSchedule::Kind::weighted)
    throw std::invalid_argument(
        "run_fusion_free: weighted schedules need the global RLS estimate, which the "
        "fusion-free architecture does not exchange");

  const int N = scenario.N;
  const int K = scenario.K;
  FusionFreeResult result;
  result.ledger.mode = SignalingLedger::Mode::fusion_free;
  result.node_trajectories.resize(N);

  ScenarioRng rng(scenario.seed);
  SparseSignal signal = generate_signal(scenario, rng.signal_stream());
  std::vector<FusionFreeNode> nodes;
  nodes.reserve(N);
  for (int n = 1; n <= N; ++n) nodes.emplace_back(n, K, cfg.estimator, cfg.forgetting);

  std::vector<NodeMessage> inbox(N);
  for (long t = 1; t <= T; ++t) {
    const auto samples = generate_instance(signal, scenario, t, rng);

    detail::for_each_node(cfg.threaded, N, [&](int i) {
      nodes[i].observe(samples[i]);
      inbox[i] = nodes[i].phase1_message();
    });
    Vector diag_sum = Vector::Zero(K);
    Vector grad_sum = Vector::Zero(K);
    for (int i = 0; i < N; ++i) {  // fixed node order
      diag_sum += inbox[i].payload.head(K);
      grad_sum += inbox[i].payload.tail(K);
    }

    detail::for_each_node(cfg.threaded, N, [&](int i) {
      nodes[i].absorb_phase1(diag_sum, grad_sum);
      inbox[i] = nodes[i].phase2_message();
    });
    Vector Gx_sum = Vector::Zero(K);
    Vector Gxhat_sum = Vector::Zero(K);
    for (int i = 0; i < N; ++i) {
      Gx_sum += inbox[i].payload.head(K);
      Gxhat_sum += inbox[i].payload.tail(K);
    }

    std::vector<std::pair<double, Vector>> outcome(N);
    detail::for_each_node(cfg.threaded, N,
                          [&](int i) { outcome[i] = nodes[i].absorb_phase2(Gx_sum, Gxhat_sum); });

    for (int i = 1; i < N; ++i) {
      const bool same_x = (nodes[i].estimate().array() == nodes[0].estimate().array()).all();
      if (!same_x || outcome[i].first != outcome[0].first)
        throw std::logic_error("run_fusion_free: node states diverged at t=" + std::to_string(t));
    }
    for (int i = 0; i < N; ++i) {
      result.node_trajectories[i].push_back(nodes[i].estimate());
      result.ledger.entries.push_back({t, i + 1, 2L * K, 2L * K});
    }
    result.tentative.push_back(outcome[0].second);
    result.reconstructed_loss.push_back(outcome[0].first);

    if (scenario.time_varying)
      signal = evolve_signal(signal, scenario.time_varying->alpha, rng.evolve_stream(t));
  }
  return result;
}

}  // namespace l1rls
