// Dueling Q-network: a 20 -> 32 -> 32 -> 32 rectifier trunk feeding a scalar
// value head and a 6-way advantage head, combined as
//
//   Q(s, a) = V(s) + A(s, a) - mean_a' A(s, a')
//
// All parameters live in one flat vector so that optimizers, soft target
// updates and finite-difference checks can treat the network uniformly.

#ifndef TROLLEYPACK_QNETWORK_H_
#define TROLLEYPACK_QNETWORK_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "json.hpp"

namespace trolleypack {

inline constexpr std::size_t kObservationSize = 20;
inline constexpr std::size_t kNumActions = 6;
inline constexpr std::size_t kHiddenWidth = 32;

using Observation = std::array<double, kObservationSize>;
using QValues = std::array<double, kNumActions>;

struct DenseLayout {
  std::size_t inputs;
  std::size_t outputs;
  std::size_t weight_offset;  // outputs x inputs, row-major
  std::size_t bias_offset;
};

// Layers in parameter order: three trunk layers, value head, advantage head.
inline constexpr std::size_t kNumLayers = 5;
inline constexpr std::size_t kValueLayer = 3;
inline constexpr std::size_t kAdvantageLayer = 4;

namespace internal {
constexpr std::array<DenseLayout, kNumLayers> MakeLayouts() {
  constexpr std::array<std::pair<std::size_t, std::size_t>, kNumLayers> shapes{{
      {kObservationSize, kHiddenWidth},
      {kHiddenWidth, kHiddenWidth},
      {kHiddenWidth, kHiddenWidth},
      {kHiddenWidth, 1},
      {kHiddenWidth, kNumActions},
  }};
  std::array<DenseLayout, kNumLayers> layouts{};
  std::size_t offset = 0;
  for (std::size_t i = 0; i < kNumLayers; ++i) {
    layouts[i] = {shapes[i].first, shapes[i].second, offset,
                  offset + shapes[i].first * shapes[i].second};
    offset = layouts[i].bias_offset + shapes[i].second;
  }
  return layouts;
}
}  // namespace internal

inline constexpr std::array<DenseLayout, kNumLayers> kLayouts =
    internal::MakeLayouts();
inline constexpr std::size_t kNumParameters =
    kLayouts.back().bias_offset + kLayouts.back().outputs;

// Mean-variant dueling aggregation.
QValues AggregateDueling(double value, std::span<const double, kNumActions> advantage);

// Intermediate values kept by Forward for Backward.
struct Activations {
  Observation input{};
  std::array<std::array<double, kHiddenWidth>, 3> hidden{};  // post-rectifier
  double value = 0.0;
  std::array<double, kNumActions> advantage{};
  QValues q{};
};

class QNetwork {
 public:
  // All parameters zero.
  QNetwork();
  explicit QNetwork(std::vector<double> parameters);

  // Glorot-uniform weights, zero biases.
  static QNetwork GlorotUniform(std::mt19937_64& rng);

  std::span<double> parameters() { return parameters_; }
  std::span<const double> parameters() const { return parameters_; }

  QValues Forward(const Observation& observation) const;
  QValues Forward(const Observation& observation, Activations& cache) const;

  // Adds dL/dtheta to `gradient` given dL/dQ for the cached forward pass.
  void Backward(const Activations& cache, const QValues& dq,
                std::span<double> gradient) const;

  friend bool operator==(const QNetwork&, const QNetwork&) = default;

 private:
  std::vector<double> parameters_;
};

// theta_target <- tau * theta_online + (1 - tau) * theta_target.
void SoftUpdate(std::span<double> target, std::span<const double> online,
                double tau);
void SoftUpdate(QNetwork& target, const QNetwork& online, double tau);

double HuberLoss(double error, double delta = 1.0);
double HuberDerivative(double error, double delta = 1.0);

// Supervised view of one replay sample: regress Q(observation, action) onto
// `target`.
struct TrainingSample {
  Observation observation{};
  std::size_t action = 0;
  double target = 0.0;
};

// Mean Huber loss over the batch.
double BatchLoss(const QNetwork& network, std::span<const TrainingSample> batch);

// Writes the gradient of BatchLoss into `gradient` and returns the loss.
// The parallel kernel computes per-sample gradients concurrently and reduces
// them in sample order, so both kernels return bit-identical results.
double BatchGradientSerial(const QNetwork& network,
                           std::span<const TrainingSample> batch,
                           std::span<double> gradient);
double BatchGradientParallel(const QNetwork& network,
                             std::span<const TrainingSample> batch,
                             std::span<double> gradient);

class AdamOptimizer {
 public:
  explicit AdamOptimizer(double learning_rate, double beta1 = 0.9,
                         double beta2 = 0.999, double epsilon = 1e-7);

  void Step(std::span<double> parameters, std::span<const double> gradient);

 private:
  double learning_rate_;
  double beta1_;
  double beta2_;
  double epsilon_;
  std::int64_t steps_ = 0;
  std::vector<double> first_moment_;
  std::vector<double> second_moment_;
};

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json CheckpointToJson(const QNetwork& network);
QNetwork CheckpointFromJson(const nlohmann::json& doc);
void SaveCheckpoint(const std::filesystem::path& path, const QNetwork& network);
QNetwork LoadCheckpoint(const std::filesystem::path& path);

}  // namespace trolleypack

#endif  // TROLLEYPACK_QNETWORK_H_
