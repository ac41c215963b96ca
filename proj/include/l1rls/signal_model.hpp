#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "l1rls/core.hpp"
#include "l1rls/rng.hpp"

namespace l1rls {

/// Ground-truth sparse signal: values plus the index set of its nonzeros.
struct SparseSignal {
  Vector values;
  std::vector<int> support;  // indices k with values[k] != 0, ascending

  static SparseSignal from_values(Vector v) {
    SparseSignal s;
    s.values = std::move(v);
    for (int k = 0; k < s.values.size(); ++k)
      if (s.values[k] != 0.0) s.support.push_back(k);
    return s;
  }
};

/// One sensor's regression pair at one time instance: y = g'x* + v.
struct RegressionSample {
  Vector g;
  double y = 0.0;
  int sensor_id = 1;  // in [1, N]
  long time = 1;      // t >= 1
};

struct TimeVaryingLaw {
  double alpha = 0.99;  // x*_{t+1,k} = alpha x*_{t,k} + w_{t,k}, w ~ N(0, 1-alpha^2)
};

struct ScenarioConfig {
  int K = 100;
  int N = 1;
  double density = 0.1;
  double noise_variance = 0.2;
  long horizon = 1000;
  std::uint64_t seed = 1;
  bool nonnegative = false;
  std::optional<TimeVaryingLaw> time_varying;
  bool leading_support = false;  // nonzeros occupy indices 1..round(density*K)

  int support_size() const { return static_cast<int>(std::lround(density * K)); }

  void validate() const {
    if (K < 1) throw std::invalid_argument("ScenarioConfig: K must be >= 1");
    if (N < 1) throw std::invalid_argument("ScenarioConfig: N must be >= 1");
    if (!(density > 0.0 && density <= 1.0))
      throw std::invalid_argument("ScenarioConfig: density must be in (0, 1]");
    if (noise_variance < 0.0)
      throw std::invalid_argument("ScenarioConfig: noise_variance must be >= 0");
    if (horizon < 1) throw std::invalid_argument("ScenarioConfig: horizon must be >= 1");
    if (time_varying && !(time_varying->alpha > 0.0 && time_varying->alpha < 1.0))
      throw std::invalid_argument("ScenarioConfig: time_varying.alpha must be in (0, 1)");
  }
};

/// Draws the ground-truth signal: round(density*K) nonzeros, i.i.d. standard
/// normal (folded to |N(0,1)| in nonnegative mode). Support is the leading
/// block in leading_support mode, otherwise a uniform random subset.
inline SparseSignal generate_signal(const ScenarioConfig& cfg, StreamRng rng) {
  cfg.validate();
  const int m = cfg.support_size();
  if (m < 1)
    throw std::invalid_argument("generate_signal: density*K rounds to zero nonzeros");

  std::vector<int> support;
  if (cfg.leading_support) {
    support.resize(m);
    std::iota(support.begin(), support.end(), 0);
  } else {
    std::vector<int> pool(cfg.K);
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < m; ++i) {
      const auto j = i + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(cfg.K - i)));
      std::swap(pool[i], pool[j]);
    }
    support.assign(pool.begin(), pool.begin() + m);
    std::sort(support.begin(), support.end());
  }

  SparseSignal s;
  s.values = Vector::Zero(cfg.K);
  s.support = std::move(support);
  for (int k : s.support) {
    double v = rng.normal();
    if (cfg.nonnegative) v = std::abs(v);
    s.values[k] = v;
  }
  return s;
}

/// One time instance: N samples with g ~ N(0, I_K), v ~ N(0, noise_variance),
/// y = g'x* + v. Sensor n at time t always draws from the same split stream.
inline std::vector<RegressionSample> generate_instance(const SparseSignal& signal,
                                                       const ScenarioConfig& cfg, long t,
                                                       const ScenarioRng& rng) {
  cfg.validate();
  if (signal.values.size() != cfg.K)
    throw std::invalid_argument("generate_instance: signal length != K");
  if (t < 1) throw std::invalid_argument("generate_instance: t must be >= 1");

  const double noise_std = std::sqrt(cfg.noise_variance);
  std::vector<RegressionSample> samples;
  samples.reserve(cfg.N);
  for (int n = 1; n <= cfg.N; ++n) {
    StreamRng stream = rng.sample_stream(n, t);
    RegressionSample s;
    s.g = Vector::NullaryExpr(cfg.K, [&](Eigen::Index) { return stream.normal(); });
    s.y = s.g.dot(signal.values) + stream.normal(noise_std);
    s.sensor_id = n;
    s.time = t;
    samples.push_back(std::move(s));
  }
  return samples;
}

/// First-order autoregression on the support: x_{t+1,k} = alpha x_{t,k} + w,
/// w ~ N(0, 1-alpha^2); zero entries stay zero, support unchanged.
inline SparseSignal evolve_signal(const SparseSignal& signal, double alpha, StreamRng rng) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("evolve_signal: alpha must be in (0, 1)");
  const double innovation_std = std::sqrt(1.0 - alpha * alpha);
  SparseSignal out = signal;
  for (int k : out.support)
    out.values[k] = alpha * out.values[k] + rng.normal(innovation_std);
  return out;
}

// -- key-value config file ("key = value" lines, '#' comments) --------------

namespace detail {
inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  const auto b = s.find_last_not_of(" \t\r");
  return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}
inline bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("config: bad boolean for " + key + ": " + v);
}
}  // namespace detail

inline ScenarioConfig load_scenario_config(std::istream& in) {
  ScenarioConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(lineno) + " has no '='");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    if (key == "K") cfg.K = std::stoi(val);
    else if (key == "N") cfg.N = std::stoi(val);
    else if (key == "density") cfg.density = std::stod(val);
    else if (key == "noise_variance") cfg.noise_variance = std::stod(val);
    else if (key == "horizon") cfg.horizon = std::stol(val);
    else if (key == "seed") cfg.seed = std::stoull(val);
    else if (key == "nonnegative") cfg.nonnegative = detail::parse_bool(val, key);
    else if (key == "leading_support") cfg.leading_support = detail::parse_bool(val, key);
    else if (key == "time_varying.alpha") cfg.time_varying = TimeVaryingLaw{std::stod(val)};
    else throw std::invalid_argument("config: unknown key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

inline ScenarioConfig load_scenario_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  return load_scenario_config(in);
}

}  // namespace l1rls
