#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tiprdc/rng.hpp"
#include "tiprdc/tensor.hpp"

namespace tiprdc {

/// Architecture of a fully connected network. `activations` holds one entry
/// per layer, hidden layers first and the output layer last, so its length is
/// hidden.size() + 1. Valid names: "relu", "sigmoid", "identity".
struct ModelSpec {
  Index input_dim = 0;
  std::vector<Index> hidden;
  Index output_dim = 0;
  std::vector<std::string> activations;

  /// Common case: relu on hidden layers, identity (raw logits) on the output.
  static ModelSpec dense(Index input_dim, std::vector<Index> hidden, Index output_dim);
};

void validate_spec(const ModelSpec& spec);

Tensor apply_activation(const std::string& name, const Tensor& x);

struct DenseLayer {
  Tensor weight;  // in x out
  Tensor bias;    // 1 x out
};

/// Fully connected network with Glorot-uniform weights and zero biases.
class Mlp {
 public:
  Mlp() = default;
  Mlp(const ModelSpec& spec, RngStream& rng);

  /// x is B x input_dim; returns B x output_dim.
  Tensor forward(const Tensor& x) const;

  std::vector<Tensor> params() const;
  const ModelSpec& spec() const { return spec_; }
  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

 private:
  ModelSpec spec_;
  std::vector<DenseLayer> layers_;
};

/// Feature extractor application: validates that x matches the input width.
Tensor extract(const Mlp& extractor, const Tensor& x);

/// Classifier head application: validates that z matches the input width.
Tensor classify(const Mlp& classifier, const Tensor& z);

/// Architecture of the bound estimator's scoring network. Layers are
/// numbered from 0; layer 0 sees the raw record x alone. The representation
/// z and the one-hot attribute u are concatenated into the inputs of layers
/// z_layer and u_layer, each in [1, hidden.size()] so x passes through at
/// least one transform first (both may name the same layer, z first).
/// Output is a single unconstrained score per row.
struct CriticSpec {
  Index x_dim = 0;
  Index z_dim = 0;
  int u_classes = 0;
  std::vector<Index> hidden;
  std::size_t z_layer = 1;
  std::size_t u_layer = 1;
};

void validate_spec(const CriticSpec& spec);

class Critic {
 public:
  Critic() = default;
  Critic(const CriticSpec& spec, RngStream& rng);

  /// Scores rows of (x, z, u); all three must have B rows. Returns B x 1.
  Tensor score(const Tensor& x, const Tensor& z, const Tensor& u_onehot) const;

  std::vector<Tensor> params() const;
  const CriticSpec& spec() const { return spec_; }
  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

 private:
  CriticSpec spec_;
  std::vector<DenseLayer> layers_;
};

/// Glorot-uniform matrix: Var = 2 / (fan_in + fan_out).
Matrix glorot_uniform(Index fan_in, Index fan_out, RngStream& rng);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  // Step decay: lr is multiplied by `decay` every `decay_every` steps.
  // decay_every == 0 keeps the rate constant.
  double decay = 1.0;
  std::int64_t decay_every = 0;
};

/// Adam with bias correction, bound to a fixed parameter list.
class Adam {
 public:
  Adam() = default;
  Adam(std::vector<Tensor> params, AdamConfig config);

  /// Applies one update from the accumulated gradients and clears nothing;
  /// callers zero gradients themselves. A parameter with no gradient at all
  /// indicates a wiring bug upstream and raises ContractError.
  void step();

  double current_lr() const;
  std::int64_t steps_taken() const { return t_; }
  const AdamConfig& config() const { return config_; }

 private:
  std::vector<Tensor> params_;
  AdamConfig config_;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
  std::int64_t t_ = 0;
};

void zero_grads(const std::vector<Tensor>& params);

std::vector<int> argmax_rows(const Matrix& logits);

/// Fraction of rows whose argmax matches the label.
double accuracy(const Matrix& logits, const std::vector<int>& labels);

/// Applies a network to every row; plain value computation, no graph.
Matrix map_features(const Mlp& net, const Matrix& X);

}  // namespace tiprdc
