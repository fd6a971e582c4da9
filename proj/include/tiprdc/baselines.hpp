#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tiprdc/datasets.hpp"
#include "tiprdc/nn.hpp"
#include "tiprdc/rng.hpp"

namespace tiprdc {

/// Adds N(0, sigma^2) to every entry.
Matrix noisy_transform(const Matrix& X, double sigma, RngStream& rng);

/// Per-feature Laplace mechanism. Sensitivity is the feature's value range
/// over train_X; each entry of X gets Laplace(sensitivity / epsilon) noise.
/// Constant features have zero sensitivity and pass through unchanged; one
/// warning per such feature is appended when `warnings` is non-null.
Matrix dp_transform(const Matrix& X, const Matrix& train_X, double epsilon,
                    RngStream& rng, std::vector<std::string>* warnings = nullptr);

struct AutoencoderResult {
  Mlp encoder;
  Mlp decoder;
  double train_mse = 0.0;  // reconstruction error after training
};

/// Encoder d -> hidden -> z_dim, decoder mirrored, trained to minimize mean
/// squared reconstruction error on train_X.
AutoencoderResult train_autoencoder(const Matrix& train_X, Index z_dim,
                                    const std::vector<Index>& hidden, Index epochs,
                                    Index batch_size, const AdamConfig& adam,
                                    std::uint64_t seed);

/// Principal components of the fitted data, largest variance first.
/// Component signs are fixed so the entry of largest magnitude is positive.
struct Pca {
  Matrix mean;                     // 1 x d
  Matrix components;               // d x k
  std::vector<double> eigenvalues; // length k, descending

  static Pca fit(const Matrix& X, Index k);
  Matrix transform(const Matrix& X) const;
};

enum class BaselineKind { noisy, dp, encoder, hybrid };

BaselineKind baseline_kind_from_name(const std::string& name);
std::string baseline_kind_name(BaselineKind kind);

struct BaselineConfig {
  BaselineKind kind = BaselineKind::noisy;
  double sigma = 40.0;    // noisy
  double epsilon = 0.1;   // dp, hybrid
  Index z_dim = 8;        // encoder bottleneck (encoder, hybrid)
  Index retained_dim = 4; // principal components kept (hybrid)
  std::vector<Index> encoder_hidden = {32};
  Index epochs = 10;
  Index batch_size = 64;
  AdamConfig adam;
  std::uint64_t seed = 42;
};

void validate_config(const BaselineConfig& config, Index data_dim);

struct BaselineFeatures {
  std::string method;  // e.g. "dp eps=0.1"
  Matrix train_Z;
  Matrix eval_Z;
  std::vector<std::string> warnings;
  double recon_mse = 0.0;  // encoder and hybrid only
};

/// Produces the released representation for both splits. Noise draws, the
/// encoder and the principal components depend only on config.seed and the
/// training split.
BaselineFeatures run_baseline(const LabeledDataset& data, const BaselineConfig& config);

}  // namespace tiprdc
