#include "trolleypack/dqn.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include "trolleypack/exact.h"
#include "trolleypack/generator.h"

namespace trolleypack {

Observation EncodeObservation(const Part& part, const PackingState& state) {
  const auto modules = state.modules();
  if (modules.size() != kNumActions) {
    throw ConfigError("the agent needs exactly " + std::to_string(kNumActions) +
                      " modules, got " + std::to_string(modules.size()));
  }
  Micrometers max_length = 0;
  for (const ModuleSpec& m : modules) max_length = std::max(max_length, m.length);
  const double scale = 1.0 / static_cast<double>(max_length);

  Observation obs{};
  obs[0] = static_cast<double>(part.length) * scale;
  obs[1] = static_cast<double>(part.width) * scale;
  for (std::size_t m = 0; m < kNumActions; ++m) {
    obs[2 + 2 * m] = static_cast<double>(modules[m].length) * scale;
    obs[3 + 2 * m] = static_cast<double>(modules[m].width) * scale;
    obs[14 + m] = modules[m].capacity > 0
                      ? static_cast<double>(state.remaining(m)) /
                            static_cast<double>(modules[m].capacity)
                      : 0.0;
  }
  return obs;
}

double Reward(const Part& part, std::size_t action, const PackingState& state) {
  std::optional<std::size_t> best = BestFitModule(part, state);
  return best && *best == action ? 1.0 : -1.0;
}

std::size_t GreedyAction(const QValues& q) {
  return static_cast<std::size_t>(std::max_element(q.begin(), q.end()) -
                                  q.begin());
}

std::array<double, kNumActions> BoltzmannProbabilities(const QValues& q,
                                                       double temperature) {
  if (!(temperature > 0.0)) {
    throw std::invalid_argument("Boltzmann temperature must be positive");
  }
  std::array<double, kNumActions> logits;
  for (std::size_t a = 0; a < kNumActions; ++a) {
    logits[a] = std::clamp(q[a], -kBoltzmannClip, kBoltzmannClip) / temperature;
  }
  // Shifting by the max leaves the distribution unchanged and avoids overflow.
  const double top = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double& l : logits) {
    l = std::exp(l - top);
    total += l;
  }
  for (double& l : logits) l /= total;
  return logits;
}

std::size_t BoltzmannSample(const QValues& q, double temperature,
                            std::mt19937_64& rng) {
  const auto probs = BoltzmannProbabilities(q, temperature);
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double cumulative = 0.0;
  for (std::size_t a = 0; a < kNumActions; ++a) {
    cumulative += probs[a];
    if (u < cumulative) return a;
  }
  // Rounding can leave the cumulative sum just below 1.
  for (std::size_t a = kNumActions; a-- > 0;) {
    if (probs[a] > 0.0) return a;
  }
  return kNumActions - 1;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ConfigError("replay capacity must be positive");
}

void ReplayBuffer::Push(const Transition& transition) {
  if (items_.size() == capacity_) items_.pop_front();
  items_.push_back(transition);
}

std::vector<Transition> ReplayBuffer::Sample(std::size_t count,
                                             std::mt19937_64& rng) const {
  std::vector<Transition> batch;
  if (items_.empty()) return batch;
  std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
  batch.reserve(count);
  for (std::size_t i = 0; i < count; ++i) batch.push_back(items_[pick(rng)]);
  return batch;
}

std::vector<double> DoubleDqnTargets(std::span<const Transition> batch,
                                     const QNetwork& online,
                                     const QNetwork& target, double gamma) {
  std::vector<double> y;
  y.reserve(batch.size());
  for (const Transition& t : batch) {
    if (t.terminal) {
      y.push_back(t.reward);
      continue;
    }
    const std::size_t next_action = GreedyAction(online.Forward(t.next_observation));
    y.push_back(t.reward +
                gamma * target.Forward(t.next_observation)[next_action]);
  }
  return y;
}

void TrainerConfig::Validate() const {
  if (warmup_steps < 0) throw ConfigError("warmup_steps must be >= 0");
  if (!(target_update_tau > 0.0 && target_update_tau <= 1.0)) {
    throw ConfigError("target_update_tau must lie in (0, 1]");
  }
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in [0, 1]");
  if (batch_size <= 0) throw ConfigError("batch_size must be positive");
  if (!(learning_rate >= 0.0)) throw ConfigError("learning_rate must be >= 0");
  if (!(boltzmann_temperature > 0.0)) {
    throw ConfigError("boltzmann_temperature must be positive");
  }
  if (memory_limit == 0) throw ConfigError("memory_limit must be positive");
  if (training_steps < 0) throw ConfigError("training_steps must be >= 0");
}

TrainerConfig TrainerConfig::FromJson(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("trainer config must be a JSON object");
  TrainerConfig c;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "warmup_steps") c.warmup_steps = value.get<int>();
      else if (key == "target_update_tau") c.target_update_tau = value.get<double>();
      else if (key == "gamma") c.gamma = value.get<double>();
      else if (key == "batch_size") c.batch_size = value.get<int>();
      else if (key == "learning_rate") c.learning_rate = value.get<double>();
      else if (key == "boltzmann_temperature") c.boltzmann_temperature = value.get<double>();
      else if (key == "memory_limit") c.memory_limit = value.get<std::size_t>();
      else if (key == "training_steps") c.training_steps = value.get<std::int64_t>();
      else if (key == "parallel_batch") c.parallel_batch = value.get<bool>();
      else throw ConfigError("unknown trainer config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad trainer config value: ") + e.what());
  }
  c.Validate();
  return c;
}

TrainResult Train(const EnvConfig& env, const TrainerConfig& config,
                  std::uint64_t seed) {
  config.Validate();
  if (env.modules.size() != kNumActions) {
    throw ConfigError("the agent needs exactly 6 modules");
  }
  if (env.episodes < 0 || env.parts_per_episode <= 0) {
    throw ConfigError("episodes must be >= 0 and parts_per_episode > 0");
  }
  std::mt19937_64 rng(seed);
  TrainResult result{QNetwork::GlorotUniform(rng), {}, 0, 0};
  QNetwork& online = result.network;
  QNetwork target = online;
  AdamOptimizer optimizer(config.learning_rate);
  ReplayBuffer replay(config.memory_limit);
  std::vector<double> gradient(kNumParameters);
  std::vector<TrainingSample> samples(config.batch_size);

  for (int episode = 1; episode <= env.episodes; ++episode) {
    if (config.training_steps > 0 && result.steps >= config.training_steps) break;
    std::vector<Part> parts =
        GenerateParts(rng, env.modules, env.parts_per_episode);
    const int trolleys = MinTrolleys(parts, env.modules);
    const Instance instance =
        Instance(std::move(parts), env.modules).WithTrolleys(trolleys);
    PackingState state(instance.modules());
    double cumulative = 0.0;

    for (std::size_t i = 0; i < instance.num_parts(); ++i) {
      const Part& part = instance.parts()[i];
      Transition t;
      t.observation = EncodeObservation(part, state);
      t.action = BoltzmannSample(online.Forward(t.observation),
                                 config.boltzmann_temperature, rng);
      t.reward = Reward(part, t.action, state);
      if (state.remaining(t.action) > 0 &&
          Fits(part, instance.modules()[t.action])) {
        state.Take(t.action);
      }
      t.terminal = i + 1 == instance.num_parts();
      t.next_observation = EncodeObservation(
          t.terminal ? part : instance.parts()[i + 1], state);
      replay.Push(t);
      result.max_replay_size = std::max(result.max_replay_size, replay.size());
      cumulative += t.reward;
      ++result.steps;

      if (result.steps > config.warmup_steps) {
        const std::vector<Transition> batch =
            replay.Sample(config.batch_size, rng);
        const std::vector<double> y =
            DoubleDqnTargets(batch, online, target, config.gamma);
        for (std::size_t b = 0; b < batch.size(); ++b) {
          samples[b] = {batch[b].observation, batch[b].action, y[b]};
        }
        if (config.parallel_batch) {
          BatchGradientParallel(online, samples, gradient);
        } else {
          BatchGradientSerial(online, samples, gradient);
        }
        optimizer.Step(online.parameters(), gradient);
        SoftUpdate(target, online, config.target_update_tau);
      }
    }
    result.log.push_back(
        {episode, cumulative, config.boltzmann_temperature, result.steps});
  }
  return result;
}

void WriteTrainingLog(std::ostream& out, std::span<const EpisodeLog> log) {
  out << "episode,cumulative_reward,epsilon_or_temperature,steps\n";
  for (const EpisodeLog& e : log) {
    out << e.episode << ',' << e.cumulative_reward << ',' << e.temperature
        << ',' << e.steps << '\n';
  }
}

Solution ActGreedy(const QNetwork& network, const Instance& instance) {
  auto start = std::chrono::steady_clock::now();
  PackingState state(instance.modules());
  std::vector<std::optional<std::size_t>> chosen(instance.num_parts());
  for (std::size_t i = 0; i < instance.num_parts(); ++i) {
    const Part& part = instance.parts()[i];
    const std::size_t action =
        GreedyAction(network.Forward(EncodeObservation(part, state)));
    if (state.remaining(action) > 0 &&
        Fits(part, instance.modules()[action])) {
      state.Take(action);
    }
    chosen[i] = action;
  }
  const double elapsed = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start)
                             .count();
  return MakeSolution(instance, chosen, "dqn", elapsed);
}

}  // namespace trolleypack
