#include "tiprdc/nn.hpp"

#include <cmath>
#include <utility>

namespace tiprdc {

ModelSpec ModelSpec::dense(Index input_dim, std::vector<Index> hidden, Index output_dim) {
  ModelSpec spec;
  spec.input_dim = input_dim;
  spec.hidden = std::move(hidden);
  spec.output_dim = output_dim;
  spec.activations.assign(spec.hidden.size(), "relu");
  spec.activations.push_back("identity");
  return spec;
}

namespace {

bool known_activation(const std::string& name) {
  return name == "relu" || name == "sigmoid" || name == "identity";
}

}  // namespace

void validate_spec(const ModelSpec& spec) {
  if (spec.input_dim < 1)
    throw ConfigError("model spec: input_dim must be positive, got " +
                      std::to_string(spec.input_dim));
  if (spec.output_dim < 1)
    throw ConfigError("model spec: output_dim must be positive, got " +
                      std::to_string(spec.output_dim));
  for (Index h : spec.hidden)
    if (h < 1)
      throw ConfigError("model spec: hidden width must be positive, got " +
                        std::to_string(h));
  if (spec.activations.size() != spec.hidden.size() + 1)
    throw ConfigError("model spec: expected " + std::to_string(spec.hidden.size() + 1) +
                      " activations (one per layer), got " +
                      std::to_string(spec.activations.size()));
  for (const auto& a : spec.activations)
    if (!known_activation(a))
      throw ConfigError("model spec: unknown activation '" + a + "'");
}

Tensor apply_activation(const std::string& name, const Tensor& x) {
  if (name == "relu") return relu(x);
  if (name == "sigmoid") return sigmoid(x);
  if (name == "identity") return x;
  throw ConfigError("unknown activation '" + name + "'");
}

Matrix glorot_uniform(Index fan_in, Index fan_out, RngStream& rng) {
  double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Matrix w(fan_in, fan_out);
  for (Index i = 0; i < fan_in; ++i)
    for (Index j = 0; j < fan_out; ++j) w(i, j) = rng.uniform(-limit, limit);
  return w;
}

namespace {

DenseLayer make_layer(Index in, Index out, RngStream& rng) {
  DenseLayer layer;
  layer.weight = Tensor::parameter(glorot_uniform(in, out, rng));
  layer.bias = Tensor::parameter(Matrix::Zero(1, out));
  return layer;
}

Tensor affine(const DenseLayer& layer, const Tensor& h) {
  return add(matmul(h, layer.weight), tile_rows(layer.bias, h.rows()));
}

}  // namespace

Mlp::Mlp(const ModelSpec& spec, RngStream& rng) : spec_(spec) {
  validate_spec(spec_);
  Index in = spec_.input_dim;
  for (Index h : spec_.hidden) {
    layers_.push_back(make_layer(in, h, rng));
    in = h;
  }
  layers_.push_back(make_layer(in, spec_.output_dim, rng));
}

Tensor Mlp::forward(const Tensor& x) const {
  if (x.cols() != spec_.input_dim)
    throw ShapeError("forward: input is " + shape_str(x.rows(), x.cols()) +
                     ", network expects width " + std::to_string(spec_.input_dim));
  Tensor h = x;
  for (std::size_t l = 0; l < layers_.size(); ++l)
    h = apply_activation(spec_.activations[l], affine(layers_[l], h));
  return h;
}

std::vector<Tensor> Mlp::params() const {
  std::vector<Tensor> out;
  out.reserve(layers_.size() * 2);
  for (const auto& layer : layers_) {
    out.push_back(layer.weight);
    out.push_back(layer.bias);
  }
  return out;
}

Tensor extract(const Mlp& extractor, const Tensor& x) {
  if (x.cols() != extractor.spec().input_dim)
    throw ShapeError("extract: record width " + std::to_string(x.cols()) +
                     " does not match extractor input " +
                     std::to_string(extractor.spec().input_dim));
  return extractor.forward(x);
}

Tensor classify(const Mlp& classifier, const Tensor& z) {
  if (z.cols() != classifier.spec().input_dim)
    throw ShapeError("classify: representation width " + std::to_string(z.cols()) +
                     " does not match classifier input " +
                     std::to_string(classifier.spec().input_dim));
  return classifier.forward(z);
}

void validate_spec(const CriticSpec& spec) {
  if (spec.x_dim < 1 || spec.z_dim < 1)
    throw ConfigError("critic spec: x_dim and z_dim must be positive");
  if (spec.u_classes < 2)
    throw ConfigError("critic spec: u_classes must be at least 2, got " +
                      std::to_string(spec.u_classes));
  if (spec.hidden.empty())
    throw ConfigError("critic spec: need at least one hidden layer");
  for (Index h : spec.hidden)
    if (h < 1)
      throw ConfigError("critic spec: hidden width must be positive, got " +
                        std::to_string(h));
  if (spec.z_layer < 1 || spec.z_layer > spec.hidden.size())
    throw ConfigError("critic spec: z_layer " + std::to_string(spec.z_layer) +
                      " outside [1, " + std::to_string(spec.hidden.size()) + "]");
  if (spec.u_layer < 1 || spec.u_layer > spec.hidden.size())
    throw ConfigError("critic spec: u_layer " + std::to_string(spec.u_layer) +
                      " outside [1, " + std::to_string(spec.hidden.size()) + "]");
}

Critic::Critic(const CriticSpec& spec, RngStream& rng) : spec_(spec) {
  validate_spec(spec_);
  std::size_t n_layers = spec_.hidden.size() + 1;
  for (std::size_t l = 0; l < n_layers; ++l) {
    Index in = l == 0 ? spec_.x_dim : spec_.hidden[l - 1];
    if (spec_.z_layer == l) in += spec_.z_dim;
    if (spec_.u_layer == l) in += spec_.u_classes;
    Index out = l < spec_.hidden.size() ? spec_.hidden[l] : 1;
    layers_.push_back(make_layer(in, out, rng));
  }
}

Tensor Critic::score(const Tensor& x, const Tensor& z, const Tensor& u_onehot) const {
  if (x.cols() != spec_.x_dim)
    throw ShapeError("critic: record width " + std::to_string(x.cols()) +
                     " does not match x_dim " + std::to_string(spec_.x_dim));
  if (z.cols() != spec_.z_dim)
    throw ShapeError("critic: representation width " + std::to_string(z.cols()) +
                     " does not match z_dim " + std::to_string(spec_.z_dim));
  if (u_onehot.cols() != spec_.u_classes)
    throw ShapeError("critic: attribute width " + std::to_string(u_onehot.cols()) +
                     " does not match u_classes " + std::to_string(spec_.u_classes));
  if (x.rows() != z.rows() || x.rows() != u_onehot.rows())
    throw ShapeError("critic: row counts differ, x " + shape_str(x.rows(), x.cols()) +
                     ", z " + shape_str(z.rows(), z.cols()) + ", u " +
                     shape_str(u_onehot.rows(), u_onehot.cols()));
  Tensor h = x;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    if (spec_.z_layer == l) h = concat_cols(h, z);
    if (spec_.u_layer == l) h = concat_cols(h, u_onehot);
    h = affine(layers_[l], h);
    if (l < spec_.hidden.size()) h = relu(h);
  }
  return h;
}

std::vector<Tensor> Critic::params() const {
  std::vector<Tensor> out;
  out.reserve(layers_.size() * 2);
  for (const auto& layer : layers_) {
    out.push_back(layer.weight);
    out.push_back(layer.bias);
  }
  return out;
}

Adam::Adam(std::vector<Tensor> params, AdamConfig config)
    : params_(std::move(params)), config_(config) {
  if (config_.lr <= 0.0) throw ConfigError("adam: lr must be positive");
  if (config_.beta1 < 0.0 || config_.beta1 >= 1.0 || config_.beta2 < 0.0 ||
      config_.beta2 >= 1.0)
    throw ConfigError("adam: betas must lie in [0, 1)");
  if (config_.eps <= 0.0) throw ConfigError("adam: eps must be positive");
  if (config_.decay <= 0.0 || config_.decay > 1.0)
    throw ConfigError("adam: decay must lie in (0, 1]");
  if (config_.decay_every < 0) throw ConfigError("adam: decay_every must be >= 0");
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const auto& p : params_) {
    if (!p.requires_grad())
      throw ContractError("adam: bound tensor does not require gradients");
    m_.push_back(Matrix::Zero(p.rows(), p.cols()));
    v_.push_back(Matrix::Zero(p.rows(), p.cols()));
  }
}

double Adam::current_lr() const {
  if (config_.decay_every <= 0) return config_.lr;
  auto drops = t_ / config_.decay_every;
  return config_.lr * std::pow(config_.decay, static_cast<double>(drops));
}

void Adam::step() {
  double lr = current_lr();
  ++t_;
  double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Tensor& p = params_[i];
    if (!p.has_grad())
      throw ContractError("adam: parameter " + std::to_string(i) +
                          " received no gradient this step");
    Matrix g = p.grad();
    m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * g;
    v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * g.cwiseProduct(g);
    Matrix update =
        (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + config_.eps);
    p.value() -= lr * update.matrix();
  }
}

void zero_grads(const std::vector<Tensor>& params) {
  for (auto p : params) p.zero_grad();
}

std::vector<int> argmax_rows(const Matrix& logits) {
  std::vector<int> out(static_cast<std::size_t>(logits.rows()));
  for (Index i = 0; i < logits.rows(); ++i) {
    int best = 0;
    for (Index j = 1; j < logits.cols(); ++j)
      if (logits(i, j) > logits(i, best)) best = static_cast<int>(j);
    out[static_cast<std::size_t>(i)] = best;
  }
  return out;
}

double accuracy(const Matrix& logits, const std::vector<int>& labels) {
  if (logits.rows() == 0) throw ContractError("accuracy: no rows");
  if (static_cast<std::size_t>(logits.rows()) != labels.size())
    throw ContractError("accuracy: " + std::to_string(logits.rows()) + " rows vs " +
                        std::to_string(labels.size()) + " labels");
  auto pred = argmax_rows(logits);
  Index hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (pred[i] == labels[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(logits.rows());
}

Matrix map_features(const Mlp& net, const Matrix& X) {
  if (X.cols() != net.spec().input_dim)
    throw ShapeError("map_features: record width " + std::to_string(X.cols()) +
                     " does not match network input " +
                     std::to_string(net.spec().input_dim));
  Matrix h = X;
  const auto& layers = net.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    Matrix a = h * layers[l].weight.value();
    a += layers[l].bias.value().replicate(a.rows(), 1);
    const std::string& act = net.spec().activations[l];
    if (act == "relu") {
      a = a.cwiseMax(0.0);
    } else if (act == "sigmoid") {
      a = a.unaryExpr([](double v) {
        return v >= 0.0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
      });
    }
    h = std::move(a);
  }
  return h;
}

}  // namespace tiprdc
