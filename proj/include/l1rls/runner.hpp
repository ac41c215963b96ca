#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "l1rls/baselines.hpp"
#include "l1rls/estimator.hpp"
#include "l1rls/signal_model.hpp"
#include "l1rls/stats.hpp"

namespace l1rls {

enum class Algorithm { parallel, parallel_exact_ls, sequential, rls, lasso_oracle };

inline const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::parallel: return "parallel";
    case Algorithm::parallel_exact_ls: return "parallel_exact_ls";
    case Algorithm::sequential: return "sequential";
    case Algorithm::rls: return "rls";
    case Algorithm::lasso_oracle: return "lasso_oracle";
  }
  return "?";
}

inline std::optional<Algorithm> algorithm_from_name(const std::string& name) {
  for (Algorithm a : {Algorithm::parallel, Algorithm::parallel_exact_ls, Algorithm::sequential,
                      Algorithm::rls, Algorithm::lasso_oracle})
    if (name == algorithm_name(a)) return a;
  return std::nullopt;
}

// -- metrics -----------------------------------------------------------------

/// Relative square error ||x - x*||^2 / ||x*||^2.
inline double metric_relative_square_error(const Vector& x, const Vector& x_true) {
  const double denom = x_true.squaredNorm();
  if (denom == 0.0) throw std::invalid_argument("relative square error: zero true signal");
  return (x - x_true).squaredNorm() / denom;
}

/// Relative error in objective value against the lasso optimum, reported as
/// the nonnegative ratio |L(x) - L(opt)| / |L(opt)| (the raw denominator is
/// negative at the optimum). Undefined when |L(opt)| <= 1e-14.
struct ObjectiveErrorMetric {
  double ratio;         // |L(x) - L(opt)| / |L(opt)|
  double signed_ratio;  // (L(x) - L(opt)) / L(opt); negative denominator at the optimum
};

inline std::optional<ObjectiveErrorMetric> objective_error(const Vector& x,
                                                           const SufficientStats& stats,
                                                           const Vector& mu,
                                                           const Vector& oracle_x) {
  const double L_opt = evaluate_objective(stats, mu, oracle_x);
  if (std::abs(L_opt) <= 1e-14) return std::nullopt;
  const double L_x = evaluate_objective(stats, mu, x);
  return ObjectiveErrorMetric{std::abs(L_x - L_opt) / std::abs(L_opt), (L_x - L_opt) / L_opt};
}

inline std::optional<double> metric_relative_objective_error(const Vector& x,
                                                             const SufficientStats& stats,
                                                             const Vector& mu,
                                                             const Vector& oracle_x) {
  const auto m = objective_error(x, stats, mu, oracle_x);
  if (!m) return std::nullopt;
  return m->ratio;
}

/// Signed stepsize error (simplified - optimal) / optimal * 100%.
inline std::optional<double> metric_stepsize_error(double gamma_simplified,
                                                   double gamma_optimal) {
  if (gamma_optimal == 0.0) return std::nullopt;
  return (gamma_simplified - gamma_optimal) / gamma_optimal * 100.0;
}

// -- scenario driver ---------------------------------------------------------

struct RunConfig {
  ScenarioConfig scenario;
  RegularizationSchedule schedule;
  ProximalWeightRule proximal;
  bool nonnegative = false;
  double forgetting = 1.0;
  std::vector<Algorithm> algorithms{Algorithm::parallel};
  OracleConfig oracle;
  bool track_exact_stepsize = false;  // gamma_opt alongside the simplified parallel run
  bool track_weight_factors = false;  // weighted schedules only
  bool check_invariants = false;      // descent proposition + reset guarantee
  double descent_slack = 1e-9;
};

struct AlgoTrace {
  // Indexed by instance; entry t-1 is evaluated against L^(t) and x*_t.
  // Iterative algorithms record the pre-update iterate x^(t); one-shot
  // solvers (rls, lasso_oracle) record their instance-t solution.
  std::vector<double> objective;
  std::vector<double> rel_square_error;
  std::vector<double> rel_obj_err;         // NaN where undefined (needs lasso_oracle)
  std::vector<double> rel_obj_err_signed;  // NaN where undefined
  std::vector<StepDiagnostics> diagnostics;
  Vector final_x;
};

struct ScenarioRunResult {
  std::map<Algorithm, AlgoTrace> traces;
  std::vector<double> gamma_simplified;  // when track_exact_stepsize
  std::vector<double> gamma_exact;
  Matrix weight_factors;  // K x T when track_weight_factors
  long descent_violations = 0;
  long reset_violations = 0;
  SparseSignal initial_signal;
  Vector final_signal_values;
};

inline bool wants(const RunConfig& cfg, Algorithm a) {
  for (Algorithm x : cfg.algorithms)
    if (x == a) return true;
  return false;
}

/// Runs every requested algorithm over one seeded sample stream. All
/// algorithms consume the identical stats trajectory; only their iterates
/// differ.
inline ScenarioRunResult run_scenario(const RunConfig& cfg) {
  cfg.scenario.validate();
  cfg.schedule.validate();
  const bool weighted = cfg.schedule.kind == RegularizationSchedule::Kind::weighted;
  if (weighted && wants(cfg, Algorithm::sequential))
    throw std::invalid_argument("run_scenario: the sequential baseline is defined for the "
                                "plain scalar schedule only");
  if (cfg.track_weight_factors && !weighted)
    throw std::invalid_argument("run_scenario: weight factors need a weighted schedule");

  const int K = cfg.scenario.K;
  const long T = cfg.scenario.horizon;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  ScenarioRunResult result;
  ScenarioRng rng(cfg.scenario.seed);
  SparseSignal signal = generate_signal(cfg.scenario, rng.signal_stream());
  result.initial_signal = signal;

  SufficientStats stats(K, cfg.forgetting);

  EstimatorConfig par_cfg;
  par_cfg.schedule = cfg.schedule;
  par_cfg.proximal = cfg.proximal;
  par_cfg.nonnegative = cfg.nonnegative;
  par_cfg.stepsize_rule = StepsizeRule::simplified;
  EstimatorConfig exact_cfg = par_cfg;
  exact_cfg.stepsize_rule = StepsizeRule::exact_oracle;

  EstimatorState par_state(K), exact_state(K), seq_state(K);
  Vector lasso_x = Vector::Zero(K);

  const bool need_lasso = wants(cfg, Algorithm::lasso_oracle);
  const bool need_rls = wants(cfg, Algorithm::rls) || weighted;
  for (Algorithm a : cfg.algorithms) result.traces[a] = AlgoTrace{};
  if (cfg.track_weight_factors) result.weight_factors.resize(K, T);

  for (long t = 1; t <= T; ++t) {
    stats.update(generate_instance(signal, cfg.scenario, t, rng));

    Vector x_rls;
    if (need_rls) x_rls = rls_solve(stats, cfg.oracle);
    const Vector mu = effective_regularizer(cfg.schedule, t, K, weighted ? &x_rls : nullptr);

    if (cfg.track_weight_factors) {
      const double mu_t = cfg.schedule.mu(t);
      for (int k = 0; k < K; ++k)
        result.weight_factors(k, t - 1) = weight_factor(mu_t, cfg.schedule.a, std::abs(x_rls[k]));
    }

    if (need_lasso) {
      const auto lasso = lasso_oracle(stats, mu, cfg.oracle, &lasso_x);
      lasso_x = lasso.x;
    }

    const auto record = [&](Algorithm a, const Vector& x) {
      AlgoTrace& trace = result.traces[a];
      trace.objective.push_back(evaluate_objective(stats, mu, x));
      trace.rel_square_error.push_back(metric_relative_square_error(x, signal.values));
      if (need_lasso) {
        const auto m = objective_error(x, stats, mu, lasso_x);
        trace.rel_obj_err.push_back(m ? m->ratio : nan);
        trace.rel_obj_err_signed.push_back(m ? m->signed_ratio : nan);
      } else {
        trace.rel_obj_err.push_back(nan);
        trace.rel_obj_err_signed.push_back(nan);
      }
    };

    if (wants(cfg, Algorithm::parallel)) {
      record(Algorithm::parallel, par_state.x);
      if (cfg.track_exact_stepsize) {
        const Vector c = cfg.proximal.at(t, K);
        const Vector xhat =
            best_response(stats, par_state.x, mu, c, cfg.nonnegative, par_cfg.c_floor);
        result.gamma_exact.push_back(exact_linesearch(stats, par_state.x, xhat, mu));
      }
      const StepDiagnostics diag = step(par_state, stats, par_cfg, weighted ? &x_rls : nullptr);
      result.traces[Algorithm::parallel].diagnostics.push_back(diag);
      if (cfg.track_exact_stepsize) result.gamma_simplified.push_back(diag.gamma);
      if (cfg.check_invariants) {
        const double lambda_max = stats.max_eigenvalue();
        const Vector c = cfg.proximal.at(t, K);
        const double c_min = (stats.G().diagonal() + c).minCoeff();
        const double lhs = diag.loss_tentative - diag.loss_before;
        const double rhs = -diag.gamma * (c_min - 0.5 * lambda_max * diag.gamma) *
                           diag.direction_norm * diag.direction_norm;
        if (lhs > rhs + cfg.descent_slack) result.descent_violations += 1;
        if (diag.loss_after > 0.0) result.reset_violations += 1;
      }
    }
    if (wants(cfg, Algorithm::parallel_exact_ls)) {
      record(Algorithm::parallel_exact_ls, exact_state.x);
      result.traces[Algorithm::parallel_exact_ls].diagnostics.push_back(
          step(exact_state, stats, exact_cfg, weighted ? &x_rls : nullptr));
    }
    if (wants(cfg, Algorithm::sequential)) {
      record(Algorithm::sequential, seq_state.x);
      sequential_step(seq_state, stats, cfg.schedule.mu(t));
    }
    if (wants(cfg, Algorithm::rls)) record(Algorithm::rls, x_rls);
    if (need_lasso) record(Algorithm::lasso_oracle, lasso_x);

    if (cfg.scenario.time_varying)
      signal = evolve_signal(signal, cfg.scenario.time_varying->alpha, rng.evolve_stream(t));
  }

  if (wants(cfg, Algorithm::parallel)) result.traces[Algorithm::parallel].final_x = par_state.x;
  if (wants(cfg, Algorithm::parallel_exact_ls))
    result.traces[Algorithm::parallel_exact_ls].final_x = exact_state.x;
  if (wants(cfg, Algorithm::sequential)) result.traces[Algorithm::sequential].final_x = seq_state.x;
  if (wants(cfg, Algorithm::rls))
    result.traces[Algorithm::rls].final_x = rls_solve(stats, cfg.oracle);
  if (need_lasso) result.traces[Algorithm::lasso_oracle].final_x = lasso_x;
  result.final_signal_values = signal.values;
  return result;
}

}  // namespace l1rls
