#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tiprdc/common.hpp"
#include "tiprdc/rng.hpp"

namespace tiprdc {

/// Rows [0, train_rows) are the training split; the rest is held out for
/// evaluation. u is the private attribute every record carries; y is the
/// utility label and may be absent (y_classes == 0).
struct LabeledDataset {
  Matrix X;
  std::vector<int> u;
  std::vector<int> y;
  int u_classes = 0;
  int y_classes = 0;
  Index train_rows = 0;
  std::string provenance;

  Index rows() const { return X.rows(); }
  Index dim() const { return X.cols(); }
  Index eval_rows() const { return X.rows() - train_rows; }
  bool has_y() const { return y_classes > 0; }

  Matrix train_X() const { return X.topRows(train_rows); }
  Matrix eval_X() const { return X.bottomRows(eval_rows()); }
  std::vector<int> train_u() const;
  std::vector<int> eval_u() const;
  std::vector<int> train_y() const;
  std::vector<int> eval_y() const;

  void validate() const;
};

/// Content hash over shapes, labels, split point and the raw feature bytes.
std::uint64_t fingerprint(const LabeledDataset& data);

/// Block-structured synthetic family. Features come in three groups:
///   - w_u columns carry the private bit: value (2u-1) with the whole block's
///     sign flipped with probability p_u, so no classifier can exceed
///     accuracy 1 - p_u on u;
///   - w_y columns carry the utility bit the same way (flip probability p_y),
///     mixed with the private signal as sqrt(1-rho^2)*b_y + rho*b_u, so
///     rho > 0 makes the utility block leak u;
///   - w_noise columns are pure unit Gaussians.
/// Every signal column also receives N(0, jitter^2) measurement noise.
struct SyntheticSpec {
  Index w_u = 4;
  Index w_y = 4;
  Index w_noise = 8;
  double p_u = 0.1;
  double p_y = 0.1;
  double rho = 0.0;
  double jitter = 0.25;
  Index train_rows = 4000;
  Index eval_rows = 2000;
};

void validate_spec(const SyntheticSpec& spec);

LabeledDataset make_synthetic(const SyntheticSpec& spec, std::uint64_t seed,
                              const std::string& name = "blocks");

/// Named presets: "family-a" (independent u and y blocks, p_u = 0.1),
/// "family-b" (leaky utility block, rho = 0.3).
SyntheticSpec synthetic_preset(const std::string& name);

/// Isotropic Gaussian records with an attribute independent of x; used to
/// probe the bound estimator in isolation (no label structure to learn).
LabeledDataset make_gaussian(Index dim, Index train_rows, Index eval_rows,
                             std::uint64_t seed);

/// Per-column affine map fitted once: (x - mean) / stddev, with zero-variance
/// columns left unscaled. Applying the same fitted map twice is NOT identity;
/// fitting on already-standardized data is.
struct Standardizer {
  Matrix mean;   // 1 x d
  Matrix scale;  // 1 x d, strictly positive

  static Standardizer fit(const Matrix& X);
  Matrix apply(const Matrix& X) const;
};

/// Column schema for CSV ingestion. All columns other than u_column and
/// y_column are taken as numeric features in file order. Leave y_column
/// empty when the file has no utility label.
struct CsvSchema {
  std::string u_column;
  int u_classes = 2;
  std::string y_column;
  int y_classes = 0;
  double train_fraction = 2.0 / 3.0;
  bool standardize = true;  // fit on the train split only
};

LabeledDataset load_csv(const std::string& path, const CsvSchema& schema);

/// Writes features as f0..f{d-1} plus label columns u (and y when present).
void save_csv(const std::string& path, const LabeledDataset& data);

enum class Split { train, eval };

/// Deterministic shuffled minibatches. The row permutation for epoch e
/// depends only on (seed, e); the trailing partial batch is dropped so every
/// batch has exactly batch_size rows.
class BatchStream {
 public:
  struct Batch {
    Matrix X;
    std::vector<int> u;
    std::vector<int> y;
  };

  BatchStream(const LabeledDataset& data, Split split, Index batch_size,
              std::uint64_t seed);

  std::vector<Batch> epoch(Index e) const;
  Index batches_per_epoch() const { return split_rows_ / batch_size_; }

 private:
  const LabeledDataset* data_;
  Split split_;
  Index batch_size_;
  Index split_rows_;
  Index offset_;  // first row of the split within the dataset
  std::uint64_t seed_;
};

}  // namespace tiprdc
