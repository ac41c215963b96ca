#include "l1rls/signal_model.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace l1rls;

namespace {

ScenarioConfig base_config() {
  ScenarioConfig cfg;
  cfg.K = 10;
  cfg.N = 1;
  cfg.density = 0.1;
  cfg.noise_variance = 0.2;
  cfg.horizon = 10;
  cfg.seed = 42;
  return cfg;
}

}  // namespace

TEST(GenerateSignal, CountForcedByDensity) {
  ScenarioConfig cfg = base_config();
  ScenarioRng rng(cfg.seed);
  const SparseSignal s = generate_signal(cfg, rng.signal_stream());
  EXPECT_EQ(s.support.size(), 1u);
  EXPECT_EQ((s.values.array() != 0.0).count(), 1);
}

TEST(GenerateSignal, LeadingSupportMode) {
  ScenarioConfig cfg = base_config();
  cfg.K = 100;
  cfg.leading_support = true;
  ScenarioRng rng(cfg.seed);
  const SparseSignal s = generate_signal(cfg, rng.signal_stream());
  ASSERT_EQ(s.support.size(), 10u);
  for (int k = 0; k < 10; ++k) {
    EXPECT_EQ(s.support[k], k);
    EXPECT_NE(s.values[k], 0.0);
  }
  EXPECT_TRUE((s.values.tail(90).array() == 0.0).all());
}

TEST(GenerateSignal, SameSeedIsBitIdentical) {
  ScenarioConfig cfg = base_config();
  cfg.K = 50;
  cfg.density = 0.3;
  ScenarioRng a(cfg.seed), b(cfg.seed);
  const SparseSignal sa = generate_signal(cfg, a.signal_stream());
  const SparseSignal sb = generate_signal(cfg, b.signal_stream());
  EXPECT_TRUE((sa.values.array() == sb.values.array()).all());
  EXPECT_EQ(sa.support, sb.support);
}

TEST(GenerateSignal, RejectsEmptySupport) {
  ScenarioConfig cfg = base_config();
  cfg.K = 4;  // round(0.4) == 0 nonzeros
  ScenarioRng rng(cfg.seed);
  EXPECT_THROW(generate_signal(cfg, rng.signal_stream()), std::invalid_argument);
}

TEST(GenerateSignal, NonnegativeModeFoldsAmplitudes) {
  ScenarioConfig cfg = base_config();
  cfg.K = 40;
  cfg.density = 0.5;
  cfg.nonnegative = true;
  ScenarioRng rng(cfg.seed);
  const SparseSignal s = generate_signal(cfg, rng.signal_stream());
  EXPECT_TRUE((s.values.array() >= 0.0).all());
  EXPECT_EQ(s.support.size(), 20u);
}

TEST(GenerateInstance, ZeroNoiseGivesExactInnerProduct) {
  ScenarioConfig cfg = base_config();
  cfg.noise_variance = 0.0;
  ScenarioRng rng(cfg.seed);
  const SparseSignal s = generate_signal(cfg, rng.signal_stream());
  const auto samples = generate_instance(s, cfg, 1, rng);
  ASSERT_EQ(samples.size(), 1u);
  EXPECT_DOUBLE_EQ(samples[0].y, samples[0].g.dot(s.values));
}

TEST(GenerateInstance, ZeroSignalMeasuresOnlyNoise) {
  ScenarioConfig cfg = base_config();
  cfg.K = 4;
  cfg.N = 2;
  SparseSignal zero;
  zero.values = Vector::Zero(cfg.K);
  ScenarioRng rng(cfg.seed);
  const long T = 5000;  // N*T = 1e4
  double sum = 0.0;
  for (long t = 1; t <= T; ++t)
    for (const auto& s : generate_instance(zero, cfg, t, rng)) sum += s.y;
  const double mean = sum / static_cast<double>(cfg.N * T);
  EXPECT_LE(std::abs(mean), 5.0 * std::sqrt(cfg.noise_variance / (cfg.N * T)));
}

TEST(GenerateInstance, SectionVSetting) {
  ScenarioConfig cfg = base_config();
  cfg.K = 100;
  cfg.N = 1;
  cfg.noise_variance = 0.2;
  ScenarioRng rng(cfg.seed);
  const SparseSignal s = generate_signal(cfg, rng.signal_stream());
  const auto samples = generate_instance(s, cfg, 1, rng);
  ASSERT_EQ(samples.size(), 1u);
  EXPECT_EQ(samples[0].g.size(), 100);
  EXPECT_EQ(samples[0].sensor_id, 1);
  EXPECT_EQ(samples[0].time, 1);
}

TEST(EvolveSignal, AlphaNearOneLeavesSignalUnchanged) {
  ScenarioConfig cfg = base_config();
  cfg.K = 20;
  cfg.density = 0.5;
  ScenarioRng rng(cfg.seed);
  const SparseSignal s = generate_signal(cfg, rng.signal_stream());
  const SparseSignal evolved = evolve_signal(s, 1.0 - 1e-15, rng.evolve_stream(1));
  EXPECT_LE((evolved.values - s.values).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(EvolveSignal, ZerosStayZeroAndSupportIsPreserved) {
  ScenarioConfig cfg = base_config();
  cfg.K = 30;
  cfg.density = 0.2;
  ScenarioRng rng(cfg.seed);
  SparseSignal s = generate_signal(cfg, rng.signal_stream());
  const auto support = s.support;
  for (long t = 1; t <= 50; ++t) s = evolve_signal(s, 0.9, rng.evolve_stream(t));
  EXPECT_EQ(s.support, support);
  for (int k = 0; k < cfg.K; ++k) {
    const bool in_support = std::find(support.begin(), support.end(), k) != support.end();
    if (!in_support) EXPECT_EQ(s.values[k], 0.0);
  }
}

TEST(EvolveSignal, RejectsAlphaOutOfRange) {
  SparseSignal s = SparseSignal::from_values(Vector::Ones(3));
  StreamRng rng(1);
  EXPECT_THROW(evolve_signal(s, 0.0, rng), std::invalid_argument);
  EXPECT_THROW(evolve_signal(s, 1.0, rng), std::invalid_argument);
  EXPECT_THROW(evolve_signal(s, 1.5, rng), std::invalid_argument);
}

// Var(x_{t,k}) = alpha^2 Var + (1 - alpha^2) = 1 is stationary when the
// initial values are N(0,1). Monte-Carlo estimate over 1e4 trajectories.
TEST(EvolveSignal, StationaryVariancePreserved) {
  const double alpha = 0.95;
  const int trajectories = 10000;
  const int steps = 40;
  StreamRng init(123);
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < trajectories; ++i) {
    SparseSignal s = SparseSignal::from_values(Vector::Constant(1, init.normal()));
    for (int t = 1; t <= steps; ++t)
      s = evolve_signal(s, alpha, StreamRng(stream_seed(9000 + i, 3, 0, t)));
    sum += s.values[0];
    sum_sq += s.values[0] * s.values[0];
  }
  const double mean = sum / trajectories;
  const double var = sum_sq / trajectories - mean * mean;
  EXPECT_NEAR(var, 1.0, 0.05);
}

TEST(Invariants, SampleStreamsAreReproducible) {
  ScenarioConfig cfg = base_config();
  cfg.K = 25;
  cfg.N = 3;
  ScenarioRng a(cfg.seed), b(cfg.seed);
  const SparseSignal s = generate_signal(cfg, a.signal_stream());
  const SparseSignal s2 = generate_signal(cfg, b.signal_stream());
  for (long t = 1; t <= 20; ++t) {
    const auto sa = generate_instance(s, cfg, t, a);
    const auto sb = generate_instance(s2, cfg, t, b);
    for (int n = 0; n < cfg.N; ++n) {
      EXPECT_TRUE((sa[n].g.array() == sb[n].g.array()).all());
      EXPECT_EQ(sa[n].y, sb[n].y);
    }
  }
}

TEST(Invariants, RegressorCovarianceApproachesIdentity) {
  ScenarioConfig cfg = base_config();
  cfg.K = 4;
  cfg.N = 2;
  cfg.noise_variance = 0.0;
  SparseSignal zero;
  zero.values = Vector::Zero(cfg.K);
  ScenarioRng rng(cfg.seed);
  const long T = 5000;  // N*T = 1e4
  Matrix cov = Matrix::Zero(cfg.K, cfg.K);
  for (long t = 1; t <= T; ++t)
    for (const auto& s : generate_instance(zero, cfg, t, rng))
      cov += s.g * s.g.transpose();
  cov /= static_cast<double>(cfg.N * T);
  const double bound = 5.0 / std::sqrt(static_cast<double>(cfg.N * T));
  for (int i = 0; i < cfg.K; ++i)
    for (int j = 0; j < cfg.K; ++j)
      if (i != j) EXPECT_LE(std::abs(cov(i, j)), bound);
}

TEST(ConfigFile, LoadsEveryField) {
  std::istringstream in(
      "# scenario\n"
      "K = 12\n"
      "N = 3\n"
      "density = 0.25\n"
      "noise_variance = 0.5\n"
      "horizon = 77\n"
      "seed = 99\n"
      "nonnegative = true\n"
      "leading_support = 1\n"
      "time_varying.alpha = 0.97\n");
  const ScenarioConfig cfg = load_scenario_config(in);
  EXPECT_EQ(cfg.K, 12);
  EXPECT_EQ(cfg.N, 3);
  EXPECT_DOUBLE_EQ(cfg.density, 0.25);
  EXPECT_DOUBLE_EQ(cfg.noise_variance, 0.5);
  EXPECT_EQ(cfg.horizon, 77);
  EXPECT_EQ(cfg.seed, 99u);
  EXPECT_TRUE(cfg.nonnegative);
  EXPECT_TRUE(cfg.leading_support);
  ASSERT_TRUE(cfg.time_varying.has_value());
  EXPECT_DOUBLE_EQ(cfg.time_varying->alpha, 0.97);
}

TEST(ConfigFile, RejectsUnknownKeysAndBadValues) {
  std::istringstream unknown("K = 10\nwhatever = 1\n");
  EXPECT_THROW(load_scenario_config(unknown), std::invalid_argument);
  std::istringstream bad_density("K = 10\ndensity = 0\n");
  EXPECT_THROW(load_scenario_config(bad_density), std::invalid_argument);
}

TEST(ScenarioConfigValidation, RejectsOutOfRangeFields) {
  ScenarioConfig cfg = base_config();
  cfg.density = 1.5;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = base_config();
  cfg.K = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = base_config();
  cfg.noise_variance = -0.1;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = base_config();
  cfg.time_varying = TimeVaryingLaw{1.2};
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}
