#include "trolleypack/qnetwork.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>

namespace trolleypack {
namespace {

// out = W in + b for one layer.
void Affine(const DenseLayout& layout, const double* params, const double* in,
            double* out) {
  const double* w = params + layout.weight_offset;
  const double* b = params + layout.bias_offset;
  for (std::size_t o = 0; o < layout.outputs; ++o) {
    double sum = b[o];
    const double* row = w + o * layout.inputs;
    for (std::size_t i = 0; i < layout.inputs; ++i) sum += row[i] * in[i];
    out[o] = sum;
  }
}

// Accumulates weight/bias gradients for one layer given dL/d(output) and
// writes dL/d(input) into `din` when non-null.
void AffineBackward(const DenseLayout& layout, const double* params,
                    const double* in, const double* dout, double* grad,
                    double* din) {
  const double* w = params + layout.weight_offset;
  double* gw = grad + layout.weight_offset;
  double* gb = grad + layout.bias_offset;
  if (din) std::fill(din, din + layout.inputs, 0.0);
  for (std::size_t o = 0; o < layout.outputs; ++o) {
    const double d = dout[o];
    if (d == 0.0) continue;
    gb[o] += d;
    const double* row = w + o * layout.inputs;
    double* grow = gw + o * layout.inputs;
    for (std::size_t i = 0; i < layout.inputs; ++i) {
      grow[i] += d * in[i];
      if (din) din[i] += d * row[i];
    }
  }
}

double SampleGradient(const QNetwork& network, const TrainingSample& sample,
                      double scale, std::span<double> gradient) {
  Activations cache;
  QValues q = network.Forward(sample.observation, cache);
  const double error = q[sample.action] - sample.target;
  QValues dq{};
  dq[sample.action] = HuberDerivative(error) * scale;
  network.Backward(cache, dq, gradient);
  return HuberLoss(error);
}

void CheckBatch(std::span<const TrainingSample> batch,
                std::span<double> gradient) {
  if (gradient.size() != kNumParameters) {
    throw std::invalid_argument("gradient buffer has wrong size");
  }
  for (const TrainingSample& s : batch) {
    if (s.action >= kNumActions) throw std::invalid_argument("action out of range");
  }
}

}  // namespace

QValues AggregateDueling(double value,
                         std::span<const double, kNumActions> advantage) {
  // Centring on the first advantage before averaging cancels a constant
  // shift before any rounding in the division.
  std::array<double, kNumActions> centred;
  double mean = 0.0;
  for (std::size_t a = 0; a < kNumActions; ++a) {
    centred[a] = advantage[a] - advantage[0];
    mean += centred[a];
  }
  mean /= static_cast<double>(kNumActions);
  QValues q;
  for (std::size_t a = 0; a < kNumActions; ++a) {
    q[a] = value + (centred[a] - mean);
  }
  return q;
}

QNetwork::QNetwork() : parameters_(kNumParameters, 0.0) {}

QNetwork::QNetwork(std::vector<double> parameters)
    : parameters_(std::move(parameters)) {
  if (parameters_.size() != kNumParameters) {
    throw std::invalid_argument("expected " + std::to_string(kNumParameters) +
                                " parameters, got " +
                                std::to_string(parameters_.size()));
  }
}

QNetwork QNetwork::GlorotUniform(std::mt19937_64& rng) {
  QNetwork network;
  for (const DenseLayout& layout : kLayouts) {
    const double limit =
        std::sqrt(6.0 / static_cast<double>(layout.inputs + layout.outputs));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (std::size_t k = 0; k < layout.inputs * layout.outputs; ++k) {
      network.parameters_[layout.weight_offset + k] = dist(rng);
    }
  }
  return network;
}

QValues QNetwork::Forward(const Observation& observation) const {
  Activations cache;
  return Forward(observation, cache);
}

QValues QNetwork::Forward(const Observation& observation,
                          Activations& cache) const {
  const double* p = parameters_.data();
  cache.input = observation;
  const double* in = cache.input.data();
  for (std::size_t l = 0; l < 3; ++l) {
    Affine(kLayouts[l], p, in, cache.hidden[l].data());
    for (double& h : cache.hidden[l]) h = std::max(h, 0.0);
    in = cache.hidden[l].data();
  }
  Affine(kLayouts[kValueLayer], p, in, &cache.value);
  Affine(kLayouts[kAdvantageLayer], p, in, cache.advantage.data());
  cache.q = AggregateDueling(cache.value, cache.advantage);
  return cache.q;
}

void QNetwork::Backward(const Activations& cache, const QValues& dq,
                        std::span<double> gradient) const {
  const double* p = parameters_.data();
  double* g = gradient.data();

  double dvalue = 0.0;
  for (double d : dq) dvalue += d;
  std::array<double, kNumActions> dadvantage;
  const double mean_dq = dvalue / static_cast<double>(kNumActions);
  for (std::size_t a = 0; a < kNumActions; ++a) dadvantage[a] = dq[a] - mean_dq;

  const double* top = cache.hidden[2].data();
  std::array<double, kHiddenWidth> dhidden{};
  std::array<double, kHiddenWidth> from_value{};
  AffineBackward(kLayouts[kValueLayer], p, top, &dvalue, g, from_value.data());
  AffineBackward(kLayouts[kAdvantageLayer], p, top, dadvantage.data(), g,
                 dhidden.data());
  for (std::size_t i = 0; i < kHiddenWidth; ++i) dhidden[i] += from_value[i];

  std::array<double, kHiddenWidth> dbelow{};
  for (std::size_t l = 3; l-- > 0;) {
    for (std::size_t i = 0; i < kHiddenWidth; ++i) {
      if (cache.hidden[l][i] <= 0.0) dhidden[i] = 0.0;
    }
    const double* in = l == 0 ? cache.input.data() : cache.hidden[l - 1].data();
    AffineBackward(kLayouts[l], p, in, dhidden.data(), g,
                   l == 0 ? nullptr : dbelow.data());
    dhidden = dbelow;
  }
}

void SoftUpdate(std::span<double> target, std::span<const double> online,
                double tau) {
  if (target.size() != online.size()) {
    throw std::invalid_argument("soft update between networks of different shape");
  }
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw std::invalid_argument("tau must lie in [0, 1]");
  }
  for (std::size_t k = 0; k < target.size(); ++k) {
    target[k] = tau * online[k] + (1.0 - tau) * target[k];
  }
}

void SoftUpdate(QNetwork& target, const QNetwork& online, double tau) {
  SoftUpdate(target.parameters(), online.parameters(), tau);
}

double HuberLoss(double error, double delta) {
  const double a = std::abs(error);
  return a <= delta ? 0.5 * error * error : delta * (a - 0.5 * delta);
}

double HuberDerivative(double error, double delta) {
  return std::clamp(error, -delta, delta);
}

double BatchLoss(const QNetwork& network,
                 std::span<const TrainingSample> batch) {
  if (batch.empty()) return 0.0;
  double sum = 0.0;
  for (const TrainingSample& s : batch) {
    sum += HuberLoss(network.Forward(s.observation)[s.action] - s.target);
  }
  return sum / static_cast<double>(batch.size());
}

double BatchGradientSerial(const QNetwork& network,
                           std::span<const TrainingSample> batch,
                           std::span<double> gradient) {
  CheckBatch(batch, gradient);
  std::fill(gradient.begin(), gradient.end(), 0.0);
  if (batch.empty()) return 0.0;
  const double scale = 1.0 / static_cast<double>(batch.size());
  std::vector<double> sample_gradient(kNumParameters);
  double loss = 0.0;
  for (const TrainingSample& s : batch) {
    std::fill(sample_gradient.begin(), sample_gradient.end(), 0.0);
    loss += SampleGradient(network, s, scale, sample_gradient);
    for (std::size_t k = 0; k < kNumParameters; ++k) {
      gradient[k] += sample_gradient[k];
    }
  }
  return loss * scale;
}

double BatchGradientParallel(const QNetwork& network,
                             std::span<const TrainingSample> batch,
                             std::span<double> gradient) {
  CheckBatch(batch, gradient);
  std::fill(gradient.begin(), gradient.end(), 0.0);
  if (batch.empty()) return 0.0;
  const double scale = 1.0 / static_cast<double>(batch.size());
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(batch.size());
  std::vector<double> per_sample(batch.size() * kNumParameters, 0.0);
  std::vector<double> losses(batch.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    std::span<double> row(per_sample.data() + i * kNumParameters,
                          kNumParameters);
    losses[i] = SampleGradient(network, batch[i], scale, row);
  }
  // Reduce in sample order to match the serial kernel exactly.
  double loss = 0.0;
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    loss += losses[i];
    const double* row = per_sample.data() + i * kNumParameters;
    for (std::size_t k = 0; k < kNumParameters; ++k) gradient[k] += row[k];
  }
  return loss * scale;
}

AdamOptimizer::AdamOptimizer(double learning_rate, double beta1, double beta2,
                             double epsilon)
    : learning_rate_(learning_rate),
      beta1_(beta1),
      beta2_(beta2),
      epsilon_(epsilon) {}

void AdamOptimizer::Step(std::span<double> parameters,
                         std::span<const double> gradient) {
  if (parameters.size() != gradient.size()) {
    throw std::invalid_argument("gradient size does not match parameters");
  }
  if (first_moment_.empty()) {
    first_moment_.assign(parameters.size(), 0.0);
    second_moment_.assign(parameters.size(), 0.0);
  }
  ++steps_;
  const double t = static_cast<double>(steps_);
  const double step_size = learning_rate_ *
                           std::sqrt(1.0 - std::pow(beta2_, t)) /
                           (1.0 - std::pow(beta1_, t));
  for (std::size_t k = 0; k < parameters.size(); ++k) {
    first_moment_[k] = beta1_ * first_moment_[k] + (1.0 - beta1_) * gradient[k];
    second_moment_[k] =
        beta2_ * second_moment_[k] + (1.0 - beta2_) * gradient[k] * gradient[k];
    parameters[k] -=
        step_size * first_moment_[k] / (std::sqrt(second_moment_[k]) + epsilon_);
  }
}

namespace {

constexpr const char* kLayerNames[kNumLayers] = {"hidden1", "hidden2",
                                                 "hidden3", "value",
                                                 "advantage"};

}  // namespace

nlohmann::json CheckpointToJson(const QNetwork& network) {
  nlohmann::json doc;
  doc["format"] = "trolleypack-dueling-qnetwork";
  doc["version"] = 1;
  doc["architecture"] = {{"inputs", kObservationSize},
                         {"hidden", {kHiddenWidth, kHiddenWidth, kHiddenWidth}},
                         {"actions", kNumActions},
                         {"activation", "relu"},
                         {"dueling_type", "avg"}};
  nlohmann::json layers = nlohmann::json::array();
  const auto params = network.parameters();
  for (std::size_t l = 0; l < kNumLayers; ++l) {
    const DenseLayout& layout = kLayouts[l];
    nlohmann::json weights = nlohmann::json::array();
    for (std::size_t o = 0; o < layout.outputs; ++o) {
      auto row = params.subspan(layout.weight_offset + o * layout.inputs,
                                layout.inputs);
      weights.push_back(std::vector<double>(row.begin(), row.end()));
    }
    auto bias = params.subspan(layout.bias_offset, layout.outputs);
    layers.push_back({{"name", kLayerNames[l]},
                      {"inputs", layout.inputs},
                      {"outputs", layout.outputs},
                      {"weights", std::move(weights)},
                      {"bias", std::vector<double>(bias.begin(), bias.end())}});
  }
  doc["layers"] = std::move(layers);
  return doc;
}

QNetwork CheckpointFromJson(const nlohmann::json& doc) {
  try {
    const auto& arch = doc.at("architecture");
    if (arch.at("inputs").get<std::size_t>() != kObservationSize ||
        arch.at("actions").get<std::size_t>() != kNumActions ||
        arch.at("hidden").get<std::vector<std::size_t>>() !=
            std::vector<std::size_t>{kHiddenWidth, kHiddenWidth, kHiddenWidth} ||
        arch.at("dueling_type").get<std::string>() != "avg") {
      throw CheckpointError("checkpoint architecture does not match");
    }
    const auto& layers = doc.at("layers");
    if (layers.size() != kNumLayers) {
      throw CheckpointError("checkpoint has wrong layer count");
    }
    std::vector<double> params(kNumParameters);
    for (std::size_t l = 0; l < kNumLayers; ++l) {
      const DenseLayout& layout = kLayouts[l];
      const auto& layer = layers[l];
      if (layer.at("name").get<std::string>() != kLayerNames[l]) {
        throw CheckpointError("unexpected layer name in checkpoint");
      }
      const auto& weights = layer.at("weights");
      const auto bias = layer.at("bias").get<std::vector<double>>();
      if (weights.size() != layout.outputs || bias.size() != layout.outputs) {
        throw CheckpointError(std::string("layer ") + kLayerNames[l] +
                              " has wrong shape");
      }
      for (std::size_t o = 0; o < layout.outputs; ++o) {
        const auto row = weights[o].get<std::vector<double>>();
        if (row.size() != layout.inputs) {
          throw CheckpointError(std::string("layer ") + kLayerNames[l] +
                                " has wrong shape");
        }
        std::copy(row.begin(), row.end(),
                  params.begin() + layout.weight_offset + o * layout.inputs);
      }
      std::copy(bias.begin(), bias.end(), params.begin() + layout.bias_offset);
    }
    return QNetwork(std::move(params));
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("malformed checkpoint: ") + e.what());
  }
}

void SaveCheckpoint(const std::filesystem::path& path,
                    const QNetwork& network) {
  std::ofstream out(path);
  if (!out) throw CheckpointError("cannot write " + path.string());
  out << CheckpointToJson(network).dump(1) << '\n';
}

QNetwork LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CheckpointError("cannot open " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError("malformed checkpoint: " + std::string(e.what()));
  }
  return CheckpointFromJson(doc);
}

}  // namespace trolleypack
