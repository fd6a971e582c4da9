#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "tiprdc/evaluation.hpp"
#include "tiprdc/training.hpp"

namespace tiprdc {

// Binary container layout (little-endian):
//   magic[4] | u32 version | u64 header_len | header JSON | raw arrays
// The header carries an "arrays" manifest (name, rows, cols, dtype) in
// payload order; dtypes are f64 and i32, rows stored row-major.

/// Serializes extractor, adversary and bound estimator with their specs and
/// the training configuration.
void save_checkpoint(const std::string& path, const TrainedModels& models);
TrainedModels load_checkpoint(const std::string& path);

/// A released representation with everything needed to evaluate it later:
/// both splits, the labels, and the provenance fingerprint of the dataset
/// it came from.
struct FeatureFile {
  std::string method;
  double lambda = 0.0;   // NaN for non-budget methods
  double mi_bound = 0.0; // NaN when not applicable
  Matrix train_Z;
  Matrix eval_Z;
  std::vector<int> train_u, eval_u;
  std::vector<int> train_y, eval_y;  // empty when the dataset has no y
  int u_classes = 0;
  int y_classes = 0;
  std::uint64_t data_fingerprint = 0;
};

FeatureFile make_feature_file(const LabeledDataset& data, const std::string& method,
                              const Matrix& train_Z, const Matrix& eval_Z,
                              double lambda, double mi_bound);

void save_features(const std::string& path, const FeatureFile& features);
FeatureFile load_features(const std::string& path);

/// Rebuilds a labeled dataset view over stored features so the probe
/// machinery can run on them unchanged.
LabeledDataset dataset_from_features(const FeatureFile& features);

void write_trace(const std::string& path, const std::vector<PhaseRecord>& trace);

// JSON config handling. Unknown keys are rejected so typos fail loudly
// instead of silently running defaults.
nlohmann::json to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const EvalProtocol& proto);
EvalProtocol protocol_from_json(const nlohmann::json& j);
nlohmann::json to_json(const BaselineConfig& config);
BaselineConfig baseline_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AdamConfig& config);
AdamConfig adam_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const TradeoffPoint& point);
TradeoffPoint tradeoff_point_from_json(const nlohmann::json& j);

struct Report {
  std::string dataset;  // provenance string
  std::uint64_t data_fingerprint = 0;
  std::vector<TradeoffPoint> points;
  std::vector<AuditRow> audit;
  std::vector<std::string> warnings;
};

nlohmann::json to_json(const Report& report);

/// Writes <stem>.json, <stem>.txt and per-family series CSVs
/// (<stem>_budget_series.csv for budget points, <stem>_baselines.csv for the
/// rest). Output bytes depend only on the report contents.
void write_report(const std::string& stem, const Report& report);

}  // namespace tiprdc
