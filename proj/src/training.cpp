#include "tiprdc/training.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace tiprdc {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

TrainConfig checked_config(TrainConfig config) {
  validate_config(config);
  return config;
}

}  // namespace

void validate_config(const TrainConfig& config) {
  if (!(config.lambda >= 0.0 && config.lambda <= 1.0))
    throw ConfigError("train config: lambda must lie in [0, 1], got " +
                      std::to_string(config.lambda));
  if (config.batch_size < 2)
    throw ConfigError("train config: batch_size must be at least 2");
  if (config.epochs < 0 || config.pretrain_epochs < 0)
    throw ConfigError("train config: epoch counts must be >= 0");
  if (config.classifier_iters < 1 || config.critic_iters < 1)
    throw ConfigError("train config: inner iteration counts must be >= 1");
  if (config.z_dim < 1) throw ConfigError("train config: z_dim must be positive");
  if (config.phase3_terms == Phase3Terms::classifier_only && config.lambda == 0.0)
    throw ConfigError("train config: classifier_only with lambda 0 leaves no objective");
  if (config.phase3_terms == Phase3Terms::mi_only && config.lambda == 1.0)
    throw ConfigError("train config: mi_only with lambda 1 leaves no objective");
}

Trainer::Trainer(const LabeledDataset& data, TrainConfig config)
    : data_(&data),
      config_(checked_config(std::move(config))),
      batches_(data, Split::train, config_.batch_size,
               RngPool(config_.seed).derive("batches")),
      negatives_(RngPool(config_.seed).derive("negatives")) {
  RngPool pool(config_.seed);
  RngStream er = pool.stream("extractor-init");
  RngStream cr = pool.stream("classifier-init");
  RngStream tr = pool.stream("critic-init");
  extractor_ =
      Mlp(ModelSpec::dense(data.dim(), config_.extractor_hidden, config_.z_dim), er);
  classifier_ = Mlp(
      ModelSpec::dense(config_.z_dim, config_.classifier_hidden, data.u_classes), cr);
  CriticSpec cs;
  cs.x_dim = data.dim();
  cs.z_dim = config_.z_dim;
  cs.u_classes = data.u_classes;
  cs.hidden = config_.critic_hidden;
  cs.z_layer = config_.critic_z_layer;
  cs.u_layer = config_.critic_u_layer;
  critic_ = Critic(cs, tr);
  extractor_opt_ = Adam(extractor_.params(), config_.extractor_adam);
  classifier_opt_ = Adam(classifier_.params(), config_.classifier_adam);
  critic_opt_ = Adam(critic_.params(), config_.critic_adam);
}

void Trainer::pretrain() {
  for (Index e = 0; e < config_.pretrain_epochs; ++e) {
    for (const auto& batch : batches_.epoch(epoch_)) {
      Tensor x = Tensor::constant(batch.X);
      zero_grads(extractor_.params());
      zero_grads(classifier_.params());
      Tensor ce =
          cross_entropy_loss(classify(classifier_, extract(extractor_, x)), batch.u);
      ce.backward();
      extractor_opt_.step();
      classifier_opt_.step();
    }
    ++epoch_;
  }
}

void Trainer::hybrid_step(const BatchStream::Batch& batch) {
  ++step_;
  Tensor x = Tensor::constant(batch.X);
  Tensor u_onehot = one_hot(batch.u, data_->u_classes);

  // Phases 1 and 2 see the representation as data, not as a function of the
  // extractor; one detached forward serves both.
  Tensor z_frozen = detach(extract(extractor_, x));

  double adversary_loss = kNan;
  for (Index it = 0; it < config_.classifier_iters; ++it) {
    zero_grads(classifier_.params());
    Tensor ce = cross_entropy_loss(classify(classifier_, z_frozen), batch.u);
    ce.backward();
    classifier_opt_.step();
    adversary_loss = ce.item();
  }
  trace_.push_back({step_, epoch_, 1, adversary_loss, kNan, kNan});
  if (phase_observer) phase_observer(1);

  JsdBatchPair pair = make_negative_batch(x, u_onehot, negatives_);
  double estimator_bound = kNan;
  for (Index it = 0; it < config_.critic_iters; ++it) {
    zero_grads(critic_.params());
    Tensor bound = jsd_mi_bound(critic_, z_frozen, pair);
    Tensor loss = scale(bound, -1.0);
    loss.backward();
    critic_opt_.step();
    estimator_bound = bound.item();
  }
  trace_.push_back({step_, epoch_, 2, kNan, estimator_bound, kNan});
  if (phase_observer) phase_observer(2);

  zero_grads(extractor_.params());
  zero_grads(classifier_.params());
  zero_grads(critic_.params());
  Tensor z = extract(extractor_, x);
  Tensor ce3 = cross_entropy_loss(classify(classifier_, z), batch.u);
  Tensor mi3 = jsd_mi_bound(critic_, z, pair);
  // A term whose coefficient is exactly zero is omitted from the graph, not
  // multiplied through, so endpoint budgets cannot perturb the update even in
  // the last bit.
  bool use_ce = config_.phase3_terms != Phase3Terms::mi_only && config_.lambda != 0.0;
  bool use_mi =
      config_.phase3_terms != Phase3Terms::classifier_only && config_.lambda != 1.0;
  Tensor loss3;
  if (use_ce && use_mi)
    loss3 = add(scale(ce3, -config_.lambda), scale(mi3, -(1.0 - config_.lambda)));
  else if (use_ce)
    loss3 = scale(ce3, -config_.lambda);
  else
    loss3 = scale(mi3, -(1.0 - config_.lambda));
  loss3.backward();
  extractor_opt_.step();

  double combined =
      config_.lambda * ce3.item() + (1.0 - config_.lambda) * mi3.item();
  trace_.push_back({step_, epoch_, 3, ce3.item(), mi3.item(), combined});
  if (phase_observer) phase_observer(3);
}

void Trainer::hybrid_epoch() {
  for (const auto& batch : batches_.epoch(epoch_)) hybrid_step(batch);
  ++epoch_;
}

void Trainer::train() {
  pretrain();
  for (Index e = 0; e < config_.epochs; ++e) hybrid_epoch();
}

TrainedModels Trainer::finish() {
  TrainedModels out;
  out.extractor = extractor_;
  out.classifier = classifier_;
  out.critic = critic_;
  out.config = config_;
  out.trace = std::move(trace_);
  out.data_fingerprint = fingerprint(*data_);
  return out;
}

TrainedModels train_models(const LabeledDataset& data, const TrainConfig& config) {
  Trainer trainer(data, config);
  trainer.train();
  return trainer.finish();
}

}  // namespace tiprdc
