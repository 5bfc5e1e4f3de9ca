// Dueling double-DQN agent that learns to imitate best-fit module choice.
//
// The environment presents one part at a time. The agent picks one of six
// modules; it earns +1 when its pick equals the best-fit choice and -1
// otherwise. A valid pick (fits, capacity left) is applied even when it is not
// the best fit. An invalid pick skips the part.

#ifndef TROLLEYPACK_DQN_H_
#define TROLLEYPACK_DQN_H_

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "json.hpp"
#include "trolleypack/core.h"
#include "trolleypack/heuristic.h"
#include "trolleypack/qnetwork.h"

namespace trolleypack {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// [part length, part width, (module length, module width) x 6,
//  remaining capacity fraction x 6]. Lengths are divided by the largest module
// length; capacities by each module's own capacity (0 when that is 0).
// Throws ConfigError unless the state has exactly six modules.
Observation EncodeObservation(const Part& part, const PackingState& state);

double Reward(const Part& part, std::size_t action, const PackingState& state);

// Lowest index among the maxima.
std::size_t GreedyAction(const QValues& q);

inline constexpr double kBoltzmannClip = 500.0;

// P(a) proportional to exp(clip(q_a, -500, 500) / temperature).
std::size_t BoltzmannSample(const QValues& q, double temperature,
                            std::mt19937_64& rng);
std::array<double, kNumActions> BoltzmannProbabilities(const QValues& q,
                                                       double temperature);

struct Transition {
  Observation observation{};
  std::size_t action = 0;
  double reward = 0.0;
  Observation next_observation{};
  bool terminal = false;
};

// Fixed-capacity FIFO of transitions.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 1000);

  void Push(const Transition& transition);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Transition& operator[](std::size_t i) const { return items_[i]; }

  // Uniform draws with replacement.
  std::vector<Transition> Sample(std::size_t count, std::mt19937_64& rng) const;

 private:
  std::size_t capacity_;
  std::deque<Transition> items_;
};

// y = r for terminal transitions, otherwise
// y = r + gamma * Q_target(s', argmax_a Q_online(s', a)).
std::vector<double> DoubleDqnTargets(std::span<const Transition> batch,
                                     const QNetwork& online,
                                     const QNetwork& target, double gamma);

struct TrainerConfig {
  int warmup_steps = 500;
  double target_update_tau = 0.01;
  double gamma = 0.99;
  int batch_size = 32;
  double learning_rate = 1e-3;
  double boltzmann_temperature = 1.0;
  std::size_t memory_limit = 1000;
  // No new episode starts once this many environment steps have run; 0 means
  // no cap.
  std::int64_t training_steps = 0;
  // Use the OpenMP batch-gradient kernel. Results are identical either way.
  bool parallel_batch = false;

  // Throws ConfigError.
  void Validate() const;
  // Overrides fields present in `doc`; unknown keys are rejected.
  static TrainerConfig FromJson(const nlohmann::json& doc);
};

struct EnvConfig {
  std::vector<ModuleSpec> modules;  // per-trolley configuration, 6 modules
  int episodes = 400;
  int parts_per_episode = 50;
};

struct EpisodeLog {
  int episode = 0;
  double cumulative_reward = 0.0;
  double temperature = 0.0;
  std::int64_t steps = 0;  // cumulative
};

struct TrainResult {
  QNetwork network;
  std::vector<EpisodeLog> log;
  std::size_t max_replay_size = 0;
  std::int64_t steps = 0;
};

TrainResult Train(const EnvConfig& env, const TrainerConfig& config,
                  std::uint64_t seed);

void WriteTrainingLog(std::ostream& out, std::span<const EpisodeLog> log);

// Packs parts in order with the argmax action. Invalid picks are recorded as
// assignments to the chosen module without consuming capacity, so
// CheckFeasible reports exactly the violations the agent committed.
Solution ActGreedy(const QNetwork& network, const Instance& instance);

}  // namespace trolleypack

#endif  // TROLLEYPACK_DQN_H_
