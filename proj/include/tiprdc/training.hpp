#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "tiprdc/datasets.hpp"
#include "tiprdc/nn.hpp"
#include "tiprdc/objectives.hpp"

namespace tiprdc {

/// Which terms feed the extractor update. `both` is the real objective; the
/// single-term modes exist so endpoint budgets can be checked against runs
/// that never build the other term at all.
enum class Phase3Terms { both, classifier_only, mi_only };

struct TrainConfig {
  /// Utility-privacy budget in [0, 1]: weight of the adversarial term.
  /// 1 trains for privacy only, 0 for information retention only.
  double lambda = 0.9;
  Index batch_size = 64;
  Index epochs = 10;
  Index pretrain_epochs = 2;
  /// Inner updates per step for the adversary and the bound estimator.
  Index classifier_iters = 1;
  Index critic_iters = 1;
  std::uint64_t seed = 42;

  Index z_dim = 8;
  std::vector<Index> extractor_hidden = {32};
  std::vector<Index> classifier_hidden = {16};
  std::vector<Index> critic_hidden = {32, 16};
  std::size_t critic_z_layer = 1;
  std::size_t critic_u_layer = 2;

  AdamConfig extractor_adam;
  AdamConfig classifier_adam;
  AdamConfig critic_adam;

  Phase3Terms phase3_terms = Phase3Terms::both;
};

void validate_config(const TrainConfig& config);

/// One trace row per phase per hybrid step. classifier_loss and mi_bound are
/// NaN in the phases that do not evaluate them; combined is the budget
/// objective lambda * classifier_loss + (1 - lambda) * mi_bound and is only
/// set for phase 3.
struct PhaseRecord {
  Index step = 0;
  Index epoch = 0;
  int phase = 0;
  double classifier_loss = 0.0;
  double mi_bound = 0.0;
  double combined = 0.0;
};

struct TrainedModels {
  Mlp extractor;
  Mlp classifier;
  Critic critic;
  TrainConfig config;
  std::vector<PhaseRecord> trace;
  std::uint64_t data_fingerprint = 0;
};

/// Runs the hybrid game on the training split:
///   pretrain: extractor and adversary minimize classification loss jointly,
///   then per batch: (1) adversary minimizes the classification loss on a
///   detached representation, (2) bound estimator maximizes the bound on a
///   detached representation, (3) extractor maximizes
///   lambda * loss(adversary) + (1 - lambda) * bound.
/// A budget term whose coefficient is exactly zero is left out of the
/// extractor's graph entirely, so endpoint runs march in lockstep with the
/// corresponding single-term mode.
class Trainer {
 public:
  Trainer(const LabeledDataset& data, TrainConfig config);

  void pretrain();
  void hybrid_epoch();
  void hybrid_step(const BatchStream::Batch& batch);
  /// pretrain + config.epochs hybrid epochs.
  void train();

  Mlp& extractor() { return extractor_; }
  Mlp& classifier() { return classifier_; }
  Critic& critic() { return critic_; }

  /// Instrumentation seam: invoked with 1, 2, 3 after the matching phase of
  /// each hybrid step. Snapshot audits hang off this; it must not touch RNG.
  std::function<void(int)> phase_observer;
  const std::vector<PhaseRecord>& trace() const { return trace_; }
  Index steps_taken() const { return step_; }

  TrainedModels finish();

 private:
  const LabeledDataset* data_;
  TrainConfig config_;
  Mlp extractor_;
  Mlp classifier_;
  Critic critic_;
  Adam extractor_opt_;
  Adam classifier_opt_;
  Adam critic_opt_;
  BatchStream batches_;
  RngStream negatives_;
  std::vector<PhaseRecord> trace_;
  Index step_ = 0;
  Index epoch_ = 0;  // absolute epoch counter; pretrain advances it too
};

TrainedModels train_models(const LabeledDataset& data, const TrainConfig& config);

}  // namespace tiprdc
