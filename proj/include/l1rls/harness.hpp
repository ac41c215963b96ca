#pragma once

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "l1rls/runner.hpp"

namespace l1rls {

enum class Preset {
  fig1_objective_error,
  fig2_square_error,
  fig3_signal_recovery,
  fig4_stepsize_error,
  fig5_weight_factor,
  fig6_time_varying,
  custom,
};

inline const char* preset_name(Preset p) {
  switch (p) {
    case Preset::fig1_objective_error: return "fig1_objective_error";
    case Preset::fig2_square_error: return "fig2_square_error";
    case Preset::fig3_signal_recovery: return "fig3_signal_recovery";
    case Preset::fig4_stepsize_error: return "fig4_stepsize_error";
    case Preset::fig5_weight_factor: return "fig5_weight_factor";
    case Preset::fig6_time_varying: return "fig6_time_varying";
    case Preset::custom: return "custom";
  }
  return "?";
}

inline std::optional<Preset> preset_from_name(const std::string& name) {
  for (Preset p : {Preset::fig1_objective_error, Preset::fig2_square_error,
                   Preset::fig3_signal_recovery, Preset::fig4_stepsize_error,
                   Preset::fig5_weight_factor, Preset::fig6_time_varying, Preset::custom})
    if (name == preset_name(p)) return p;
  return std::nullopt;
}

struct ExperimentSpec {
  Preset preset = Preset::custom;
  ScenarioConfig scenario;
  RegularizationSchedule schedule;
  ProximalWeightRule proximal;
  bool nonnegative = false;
  double forgetting = 1.0;
  std::vector<Algorithm> algorithms{Algorithm::parallel};
  int runs = 20;  // desk scale; --full-scale restores 100
  std::string output_path;
  OracleConfig oracle;

  void validate() const {
    scenario.validate();
    schedule.validate();
    if (runs < 1) throw std::invalid_argument("ExperimentSpec: runs must be >= 1");
    if (algorithms.empty()) throw std::invalid_argument("ExperimentSpec: no algorithms");
    const bool weighted = schedule.kind == RegularizationSchedule::Kind::weighted;
    if (preset == Preset::fig5_weight_factor && !weighted)
      throw std::invalid_argument("fig5_weight_factor requires the weighted schedule");
    if (preset == Preset::fig5_weight_factor && scenario.K < 11)
      throw std::invalid_argument("fig5_weight_factor reports elements 1 and 11; K must be >= 11");
    if (weighted)
      for (Algorithm a : algorithms)
        if (a == Algorithm::sequential)
          throw std::invalid_argument("sequential baseline is incompatible with the weighted "
                                      "schedule");
  }
};

/// Experiment presets pinned to the reference parameter set: K = 100, N = 1,
/// density 0.1, noise variance 0.2, mu^(t) = 10/t, x^(1) = 0; deviations per
/// figure noted inline.
inline ExperimentSpec make_preset(Preset p, std::uint64_t seed = 1) {
  ExperimentSpec spec;
  spec.preset = p;
  spec.scenario.K = 100;
  spec.scenario.N = 1;
  spec.scenario.density = 0.1;
  spec.scenario.noise_variance = 0.2;
  spec.scenario.horizon = 1000;
  spec.scenario.seed = seed;
  spec.schedule.kind = RegularizationSchedule::Kind::plain;
  spec.schedule.gain = 10.0;  // sqrt(K)
  spec.schedule.exponent = 1.0;
  spec.runs = 20;
  switch (p) {
    case Preset::fig1_objective_error:
      spec.algorithms = {Algorithm::parallel, Algorithm::parallel_exact_ls, Algorithm::sequential,
                         Algorithm::lasso_oracle};
      break;
    case Preset::fig2_square_error:
      spec.algorithms = {Algorithm::parallel, Algorithm::sequential, Algorithm::rls,
                         Algorithm::lasso_oracle};
      break;
    case Preset::fig3_signal_recovery:
      spec.algorithms = {Algorithm::parallel};
      spec.runs = 1;  // element-wise snapshot of one realization
      break;
    case Preset::fig4_stepsize_error:
      spec.algorithms = {Algorithm::parallel};
      break;
    case Preset::fig5_weight_factor:
      spec.algorithms = {Algorithm::parallel};
      spec.scenario.horizon = 2000;
      spec.scenario.leading_support = true;
      spec.schedule.kind = RegularizationSchedule::Kind::weighted;
      spec.schedule.gain = 1.0;
      spec.schedule.exponent = 0.4;  // mu^(t) = 1/t^0.4
      spec.schedule.a = 2.0;
      spec.runs = 1;
      break;
    case Preset::fig6_time_varying:
      spec.algorithms = {Algorithm::parallel, Algorithm::sequential, Algorithm::lasso_oracle};
      spec.scenario.horizon = 2000;
      spec.scenario.time_varying = TimeVaryingLaw{0.99};
      spec.forgetting = 0.9;
      break;
    case Preset::custom:
      break;
  }
  return spec;
}

struct ExperimentRow {
  long t;
  std::string algorithm;
  int run;
  std::string metric;
  double value;
};

struct ExperimentResult {
  std::vector<ExperimentRow> rows;
  std::string csv;
};

namespace detail {

inline void append_row(ExperimentResult& out, long t, const std::string& algo, int run,
                       const std::string& metric, double value) {
  out.rows.push_back({t, algo, run, metric, value});
  out.csv += std::to_string(t) + ',' + algo + ',' + std::to_string(run) + ',' + metric + ',' +
             format_double(value) + '\n';
}

}  // namespace detail

/// Runs the spec's Monte-Carlo repetitions (run r reuses the scenario with
/// seed = base seed + r - 1) and emits one CSV with the fixed column layout
/// (t, algorithm, run, metric_name, value). Undefined metric values are
/// skipped and flagged with a companion *_skipped row.
inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  ExperimentResult out;
  out.csv = "t,algorithm,run,metric_name,value\n";

  for (int run = 1; run <= spec.runs; ++run) {
    RunConfig rc;
    rc.scenario = spec.scenario;
    rc.scenario.seed = spec.scenario.seed + static_cast<std::uint64_t>(run - 1);
    rc.schedule = spec.schedule;
    rc.proximal = spec.proximal;
    rc.nonnegative = spec.nonnegative;
    rc.forgetting = spec.forgetting;
    rc.algorithms = spec.algorithms;
    rc.oracle = spec.oracle;
    rc.track_exact_stepsize = spec.preset == Preset::fig4_stepsize_error;
    rc.track_weight_factors = spec.preset == Preset::fig5_weight_factor;
    const ScenarioRunResult res = run_scenario(rc);

    const long T = rc.scenario.horizon;
    switch (spec.preset) {
      case Preset::fig1_objective_error:
        for (long t = 1; t <= T; ++t)
          for (Algorithm a : spec.algorithms) {
            if (a == Algorithm::lasso_oracle) continue;
            const auto& trace = res.traces.at(a);
            if (std::isnan(trace.rel_obj_err[t - 1])) {
              detail::append_row(out, t, algorithm_name(a), run, "rel_obj_err_skipped", 1.0);
            } else {
              detail::append_row(out, t, algorithm_name(a), run, "rel_obj_err",
                                 trace.rel_obj_err[t - 1]);
              detail::append_row(out, t, algorithm_name(a), run, "rel_obj_err_signed",
                                 trace.rel_obj_err_signed[t - 1]);
            }
          }
        break;
      case Preset::fig2_square_error:
      case Preset::fig6_time_varying:
        for (long t = 1; t <= T; ++t)
          for (Algorithm a : spec.algorithms)
            detail::append_row(out, t, algorithm_name(a), run, "rel_sq_err",
                               res.traces.at(a).rel_square_error[t - 1]);
        break;
      case Preset::fig3_signal_recovery: {
        const auto& trace = res.traces.at(Algorithm::parallel);
        for (int k = 0; k < rc.scenario.K; ++k) {
          detail::append_row(out, T, "parallel", run, "x_est[" + std::to_string(k + 1) + "]",
                             trace.final_x[k]);
          detail::append_row(out, T, "parallel", run, "x_true[" + std::to_string(k + 1) + "]",
                             res.final_signal_values[k]);
        }
        break;
      }
      case Preset::fig4_stepsize_error:
        for (long t = 1; t <= T; ++t) {
          const auto err =
              metric_stepsize_error(res.gamma_simplified[t - 1], res.gamma_exact[t - 1]);
          if (err)
            detail::append_row(out, t, "parallel", run, "stepsize_error_pct", *err);
          else
            detail::append_row(out, t, "parallel", run, "stepsize_error_skipped", 1.0);
        }
        break;
      case Preset::fig5_weight_factor:
        for (long t = 1; t <= T; ++t) {
          detail::append_row(out, t, "parallel", run, "weight_factor_k1",
                             res.weight_factors(0, t - 1));
          detail::append_row(out, t, "parallel", run, "weight_factor_k11",
                             res.weight_factors(10, t - 1));
        }
        break;
      case Preset::custom:
        for (long t = 1; t <= T; ++t)
          for (Algorithm a : spec.algorithms) {
            const auto& trace = res.traces.at(a);
            detail::append_row(out, t, algorithm_name(a), run, "rel_sq_err",
                               trace.rel_square_error[t - 1]);
            detail::append_row(out, t, algorithm_name(a), run, "objective",
                               trace.objective[t - 1]);
            if (wants(rc, Algorithm::lasso_oracle) && a != Algorithm::lasso_oracle) {
              if (std::isnan(trace.rel_obj_err[t - 1]))
                detail::append_row(out, t, algorithm_name(a), run, "rel_obj_err_skipped", 1.0);
              else
                detail::append_row(out, t, algorithm_name(a), run, "rel_obj_err",
                                   trace.rel_obj_err[t - 1]);
            }
          }
        break;
    }
  }

  if (!spec.output_path.empty()) {
    std::ofstream file(spec.output_path, std::ios::binary);
    if (!file) throw std::runtime_error("run_experiment: cannot open " + spec.output_path);
    file << out.csv;
    if (!file) throw std::runtime_error("run_experiment: write failed for " + spec.output_path);
  }
  return out;
}

}  // namespace l1rls
