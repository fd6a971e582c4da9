#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tiprdc/baselines.hpp"
#include "tiprdc/datasets.hpp"
#include "tiprdc/training.hpp"

namespace tiprdc {

/// Fixed probe budget shared by every method under comparison: fresh
/// classifiers of identical capacity, retrained from scratch on the released
/// features. seeds drive full pipeline repetitions (representation and
/// probes alike).
struct EvalProtocol {
  std::vector<Index> probe_hidden = {32};
  Index probe_epochs = 20;
  Index probe_batch = 64;
  AdamConfig probe_adam;
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  bool standardize = true;  // per-feature, fitted on the train split
};

void validate_protocol(const EvalProtocol& proto);

double stat_mean(const std::vector<double>& v);
/// Unbiased (n-1) standard deviation; 0 for fewer than 2 values.
double stat_sample_std(const std::vector<double>& v);

/// Trains one fresh classifier on (train_Z, train_labels) under the probe
/// budget and returns its accuracy on (eval_Z, eval_labels).
double train_probe(const Matrix& train_Z, const std::vector<int>& train_labels,
                   int classes, const Matrix& eval_Z,
                   const std::vector<int>& eval_labels,
                   const std::vector<Index>& hidden, const EvalProtocol& proto,
                   std::uint64_t seed);

struct ProbeOutcome {
  double privacy_acc = 0.0;
  double utility_acc = 0.0;  // NaN when the dataset has no utility label
};

/// Standardizes the features (when enabled) and runs the privacy probe on u
/// and the utility probe on y.
ProbeOutcome probe_features(const Matrix& train_Z, const Matrix& eval_Z,
                            const LabeledDataset& data, const EvalProtocol& proto,
                            std::uint64_t seed);

/// One point on the utility-privacy plane, aggregated over protocol seeds.
struct TradeoffPoint {
  std::string method;
  double lambda = 0.0;  // NaN for non-budget methods
  double privacy_acc = 0.0;
  double privacy_std = 0.0;
  double utility_acc = 0.0;
  double utility_std = 0.0;
  std::vector<double> privacy_by_seed;
  std::vector<double> utility_by_seed;
  double mi_bound = 0.0;  // final bound estimate; NaN for baselines
  std::uint64_t data_fingerprint = 0;
  bool pareto_dominated = false;
};

/// Probes one fixed representation under every protocol seed. Use this when
/// the features already exist; the per-method entry points below regenerate
/// them per seed so representation randomness is part of the spread.
TradeoffPoint evaluate_point(const std::string& method, double lambda, double mi_bound,
                             const Matrix& train_Z, const Matrix& eval_Z,
                             const LabeledDataset& data, const EvalProtocol& proto);

/// Full pipeline at one budget: trains the hybrid game per seed, releases
/// features, probes them.
TradeoffPoint evaluate_lambda_point(const LabeledDataset& data, TrainConfig base,
                                    double lambda, const EvalProtocol& proto);

/// Same protocol applied to a perturbation/encoding baseline.
TradeoffPoint evaluate_baseline_point(const LabeledDataset& data, BaselineConfig base,
                                      const EvalProtocol& proto);

/// The unprotected ceiling: probes run on the raw features themselves.
TradeoffPoint evaluate_raw_point(const LabeledDataset& data, const EvalProtocol& proto);

struct SweepConfig {
  std::vector<double> lambdas = {1.0, 0.9, 0.5, 0.0};
  TrainConfig train;
  EvalProtocol protocol;
  int parallel = 1;
};

struct SweepResult {
  std::vector<TradeoffPoint> points;  // lambda descending
  std::uint64_t data_fingerprint = 0;
};

/// Evaluates every budget in the grid (deduplicated, sorted descending).
/// With parallel > 1 the budgets run on worker threads; results are merged
/// in grid order and are identical to a serial run.
SweepResult sweep_lambda(const LabeledDataset& data, const SweepConfig& config);

struct AuditRow {
  std::vector<Index> hidden;
  double privacy_acc = 0.0;
  double privacy_std = 0.0;
};

struct AuditResult {
  std::vector<AuditRow> rows;
  double worst_case = 0.0;  // max mean accuracy over architectures
};

std::vector<std::vector<Index>> default_audit_archs();

/// Attacks a fixed representation with adversaries of several capacities;
/// the worst case is what a privacy claim must survive.
AuditResult adversary_audit(const Matrix& train_Z, const Matrix& eval_Z,
                            const LabeledDataset& data, const EvalProtocol& proto,
                            const std::vector<std::vector<Index>>& archs);

/// Flags points strictly beaten on both axes (lower privacy accuracy and
/// higher utility accuracy) by some other point.
void mark_pareto(std::vector<TradeoffPoint>& points);

/// Comparing points computed on different datasets is meaningless; throws
/// ContractError naming the offending methods.
void require_same_fingerprint(const std::vector<TradeoffPoint>& points);

}  // namespace tiprdc
