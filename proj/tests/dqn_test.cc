#include "trolleypack/dqn.h"

#include <cmath>
#include <random>
#include <sstream>

#include "gtest/gtest.h"
#include "test_util.h"

namespace trolleypack {
namespace {

using testing::Modules;
using testing::Parts;

std::vector<ModuleSpec> DefaultModules() {
  return Modules({{400, 300, 8},
                  {600, 400, 8},
                  {800, 600, 6},
                  {1200, 700, 4},
                  {2000, 800, 3},
                  {2800, 1000, 2}});
}

// All trunk weights zero, so Q = v + a - mean(a) regardless of the input.
QNetwork ConstantNetwork(double value, const std::array<double, 6>& advantage) {
  QNetwork net;
  net.parameters()[kLayouts[kValueLayer].bias_offset] = value;
  for (std::size_t a = 0; a < kNumActions; ++a) {
    net.parameters()[kLayouts[kAdvantageLayer].bias_offset + a] = advantage[a];
  }
  return net;
}

TEST(EncodeTest, Layout) {
  auto modules = DefaultModules();
  PackingState state(modules);
  state.Take(1);
  state.Take(1);
  Part part = Part::Make(1, FromMillimeters(350), FromMillimeters(700));
  Observation obs = EncodeObservation(part, state);
  EXPECT_DOUBLE_EQ(obs[0], 700.0 / 2800.0);
  EXPECT_DOUBLE_EQ(obs[1], 350.0 / 2800.0);
  EXPECT_DOUBLE_EQ(obs[2], 400.0 / 2800.0);
  EXPECT_DOUBLE_EQ(obs[3], 300.0 / 2800.0);
  EXPECT_DOUBLE_EQ(obs[12], 1.0);
  EXPECT_DOUBLE_EQ(obs[13], 1000.0 / 2800.0);
  EXPECT_DOUBLE_EQ(obs[14], 1.0);
  EXPECT_DOUBLE_EQ(obs[15], 6.0 / 8.0);
}

TEST(EncodeTest, ZeroCapacityEncodesAsZeroAndWrongCountThrows) {
  auto modules = DefaultModules();
  modules[3].capacity = 0;
  PackingState state(modules);
  EXPECT_EQ(EncodeObservation(Parts({{1, 1}})[0], state)[17], 0.0);

  auto five = Modules({{1, 1, 1}, {2, 2, 1}, {3, 3, 1}, {4, 4, 1}, {5, 5, 1}});
  PackingState short_state(five);
  EXPECT_THROW(EncodeObservation(Parts({{1, 1}})[0], short_state), ConfigError);
}

TEST(RewardTest, MatchesBestFitChoice) {
  auto modules = DefaultModules();
  PackingState state(modules);
  Part part = Part::Make(1, FromMillimeters(500), FromMillimeters(350));
  // Smallest fitting module is 600x400 at position 1.
  EXPECT_EQ(Reward(part, 1, state), 1.0);
  EXPECT_EQ(Reward(part, 2, state), -1.0);
  EXPECT_EQ(Reward(part, 0, state), -1.0);
  Part huge = Part::Make(2, FromMillimeters(5000), FromMillimeters(5000));
  for (std::size_t a = 0; a < kNumActions; ++a) {
    EXPECT_EQ(Reward(huge, a, state), -1.0);
  }
}

TEST(GreedyActionTest, LowestIndexAmongMaxima) {
  EXPECT_EQ(GreedyAction({0, 3, 1, 3, 2, 0}), 1u);
  EXPECT_EQ(GreedyAction({0, 0, 0, 0, 0, 0}), 0u);
}

TEST(BoltzmannTest, EqualValuesAreUniform) {
  std::mt19937_64 rng(11);
  std::array<int, kNumActions> counts{};
  constexpr int kDraws = 100000;
  for (int i = 0; i < kDraws; ++i) ++counts[BoltzmannSample(QValues{}, 1.0, rng)];
  double chi2 = 0.0;
  const double expected = kDraws / static_cast<double>(kNumActions);
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  // 5 degrees of freedom, p = 0.001.
  EXPECT_LT(chi2, 20.515);
}

TEST(BoltzmannTest, LowTemperatureConcentratesOnArgmax) {
  std::mt19937_64 rng(12);
  QValues q{0.1, 0.5, 0.49, -1, 0.2, 0.3};
  int hits = 0;
  constexpr int kDraws = 100000;
  for (int i = 0; i < kDraws; ++i) hits += BoltzmannSample(q, 1e-3, rng) == 1;
  EXPECT_GE(hits, 0.999 * kDraws);
}

TEST(BoltzmannTest, ClipsExtremeValues) {
  // 1e6 and 600 both clip to 500, so they are equally likely; the rest are
  // negligible at temperature 1.
  auto p = BoltzmannProbabilities({1e6, 600, 0, -1e6, 0, 0}, 1.0);
  EXPECT_DOUBLE_EQ(p[0], p[1]);
  EXPECT_NEAR(p[0], 0.5, 1e-12);
  double total = 0.0;
  for (double x : p) {
    ASSERT_TRUE(std::isfinite(x));
    total += x;
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_THROW(BoltzmannProbabilities({}, 0.0), std::invalid_argument);
}

TEST(DoubleDqnTest, TargetsUseOnlineArgmaxAndTargetValue) {
  QNetwork online = ConstantNetwork(0.0, {0, 0, 5, 0, 0, 1});
  QNetwork target = ConstantNetwork(1.0, {6, 0, 0, 0, 0, 0});
  // Target Q = 1 + a - 1, i.e. {6, 0, 0, 0, 0, 0}; online argmax is 2.
  std::vector<Transition> batch(3);
  batch[0].reward = 1.0;
  batch[1].reward = -1.0;
  batch[2].reward = 1.0;
  batch[2].terminal = true;
  auto y = DoubleDqnTargets(batch, online, target, 0.5);
  ASSERT_EQ(y.size(), 3u);
  EXPECT_DOUBLE_EQ(y[0], 1.0 + 0.5 * 0.0);
  EXPECT_DOUBLE_EQ(y[1], -1.0 + 0.5 * 0.0);
  EXPECT_DOUBLE_EQ(y[2], 1.0);

  // Swapping the roles picks action 0, whose target value is 0 + 0 - 1.
  auto swapped = DoubleDqnTargets(batch, target, online, 0.5);
  EXPECT_DOUBLE_EQ(swapped[0], 1.0 + 0.5 * (0.0 - 1.0));
}

TEST(DoubleDqnTest, MatchesClosedFormOnRandomNets) {
  std::mt19937_64 rng(13);
  QNetwork online = QNetwork::GlorotUniform(rng);
  QNetwork target = QNetwork::GlorotUniform(rng);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<Transition> batch(20);
  for (auto& t : batch) {
    for (double& x : t.next_observation) x = u(rng);
    t.reward = u(rng) < 0.5 ? 1.0 : -1.0;
    t.terminal = u(rng) < 0.2;
  }
  auto y = DoubleDqnTargets(batch, online, target, 0.99);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    double expected = batch[i].reward;
    if (!batch[i].terminal) {
      QValues qo = online.Forward(batch[i].next_observation);
      std::size_t best = 0;
      for (std::size_t a = 1; a < kNumActions; ++a) {
        if (qo[a] > qo[best]) best = a;
      }
      expected += 0.99 * target.Forward(batch[i].next_observation)[best];
    }
    EXPECT_EQ(y[i], expected);
  }
}

TEST(ReplayBufferTest, EvictsOldestAtCapacity) {
  ReplayBuffer buffer(3);
  for (int i = 0; i < 5; ++i) {
    Transition t;
    t.reward = i;
    buffer.Push(t);
    ASSERT_LE(buffer.size(), 3u);
  }
  EXPECT_EQ(buffer[0].reward, 2);
  EXPECT_EQ(buffer[2].reward, 4);
  std::mt19937_64 rng(1);
  auto sample = buffer.Sample(50, rng);
  EXPECT_EQ(sample.size(), 50u);
  for (const auto& t : sample) EXPECT_GE(t.reward, 2);
  EXPECT_THROW(ReplayBuffer(0), ConfigError);
}

TEST(TrainerConfigTest, JsonOverridesAndRejectsUnknownKeys) {
  auto c = TrainerConfig::FromJson({{"gamma", 0.9}, {"batch_size", 8}});
  EXPECT_EQ(c.gamma, 0.9);
  EXPECT_EQ(c.batch_size, 8);
  EXPECT_EQ(c.warmup_steps, 500);
  EXPECT_THROW(TrainerConfig::FromJson({{"epsilon", 0.1}}), ConfigError);
  EXPECT_THROW(TrainerConfig::FromJson({{"gamma", "high"}}), ConfigError);
  EXPECT_THROW(TrainerConfig::FromJson({{"target_update_tau", 0.0}}), ConfigError);
}

EnvConfig SmallEnv(int episodes) {
  return {DefaultModules(), episodes, 20};
}

TEST(TrainTest, DeterministicForSeed) {
  TrainerConfig config;
  config.warmup_steps = 10;
  config.batch_size = 8;
  TrainResult a = Train(SmallEnv(4), config, 99);
  TrainResult b = Train(SmallEnv(4), config, 99);
  EXPECT_EQ(a.network, b.network);
  ASSERT_EQ(a.log.size(), 4u);
  for (std::size_t i = 0; i < a.log.size(); ++i) {
    EXPECT_EQ(a.log[i].cumulative_reward, b.log[i].cumulative_reward);
  }
  EXPECT_EQ(a.steps, 80);
  EXPECT_EQ(a.log.back().steps, 80);

  config.parallel_batch = true;
  TrainResult c = Train(SmallEnv(4), config, 99);
  EXPECT_EQ(a.network, c.network);
}

TEST(TrainTest, ZeroLearningRateKeepsInitialization) {
  TrainerConfig config;
  config.warmup_steps = 5;
  config.learning_rate = 0.0;
  TrainResult r = Train(SmallEnv(2), config, 5);
  std::mt19937_64 rng(5);
  EXPECT_EQ(r.network, QNetwork::GlorotUniform(rng));
}

TEST(TrainTest, ReplayNeverExceedsLimitAndStepCapHolds) {
  TrainerConfig config;
  config.warmup_steps = 0;
  config.batch_size = 4;
  config.memory_limit = 30;
  config.training_steps = 50;
  TrainResult r = Train(SmallEnv(10), config, 3);
  EXPECT_EQ(r.max_replay_size, 30u);
  // The cap is checked between episodes of 20 parts.
  EXPECT_EQ(r.steps, 60);
  EXPECT_EQ(r.log.size(), 3u);
}

TEST(TrainTest, LogFormat) {
  std::vector<EpisodeLog> log{{1, 3.0, 1.0, 20}, {2, -4.0, 1.0, 40}};
  std::ostringstream out;
  WriteTrainingLog(out, log);
  EXPECT_EQ(out.str(),
            "episode,cumulative_reward,epsilon_or_temperature,steps\n"
            "1,3,1,20\n2,-4,1,40\n");
}

TEST(ActGreedyTest, ZeroNetworkPicksFirstModuleAndViolationsAreReported) {
  // The zero network ties everywhere, so every part goes to module 1.
  Instance one(Parts({{300, 200}, {350, 250}, {900, 500}}),
               Modules({{400, 300, 2},
                        {600, 400, 8},
                        {800, 600, 6},
                        {1200, 700, 4},
                        {2000, 800, 3},
                        {2800, 1000, 2}}));
  Solution s = ActGreedy(QNetwork{}, one);
  EXPECT_EQ(s.solver_name, "dqn");
  for (const auto& a : s.assignments) EXPECT_EQ(a.module_id, 1);
  EXPECT_FALSE(s.feasible);
  FeasibilityReport r = CheckFeasible(one, s);
  ASSERT_EQ(r.fit.size(), 1u);
  EXPECT_EQ(r.fit[0].part_id, 3);
  ASSERT_EQ(r.capacity.size(), 1u);
  EXPECT_EQ(r.capacity[0].usage, 3);
}

TEST(ActGreedyTest, PerfectImitatorMatchesBestFit) {
  // A network whose advantage always favours module 3 agrees with best fit
  // when every part's best module is module 3.
  QNetwork net = ConstantNetwork(0.0, {0, 0, 1, 0, 0, 0});
  Instance inst(Parts({{700, 500}, {750, 550}}), DefaultModules());
  Solution s = ActGreedy(net, inst);
  EXPECT_TRUE(s.feasible);
  EXPECT_EQ(s.assignments, BestFitPack(inst).assignments);
}

}  // namespace
}  // namespace trolleypack
