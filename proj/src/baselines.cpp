#include "tiprdc/baselines.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <utility>

namespace tiprdc {

Matrix noisy_transform(const Matrix& X, double sigma, RngStream& rng) {
  if (sigma <= 0.0) throw ConfigError("noisy_transform: sigma must be positive");
  Matrix out(X.rows(), X.cols());
  for (Index i = 0; i < X.rows(); ++i)
    for (Index j = 0; j < X.cols(); ++j) out(i, j) = X(i, j) + sigma * rng.normal();
  return out;
}

Matrix dp_transform(const Matrix& X, const Matrix& train_X, double epsilon,
                    RngStream& rng, std::vector<std::string>* warnings) {
  if (epsilon <= 0.0) throw ConfigError("dp_transform: epsilon must be positive");
  if (X.cols() != train_X.cols())
    throw ShapeError("dp_transform: width " + std::to_string(X.cols()) +
                     " does not match training width " + std::to_string(train_X.cols()));
  if (train_X.rows() < 1) throw DataError("dp_transform: empty training split");
  Matrix scales(1, X.cols());
  for (Index j = 0; j < X.cols(); ++j) {
    double sensitivity = train_X.col(j).maxCoeff() - train_X.col(j).minCoeff();
    scales(0, j) = sensitivity / epsilon;
    if (sensitivity == 0.0 && warnings)
      warnings->push_back("feature " + std::to_string(j) +
                          " has zero range on the training split; released unperturbed");
  }
  Matrix out(X.rows(), X.cols());
  for (Index i = 0; i < X.rows(); ++i)
    for (Index j = 0; j < X.cols(); ++j) {
      double b = scales(0, j);
      out(i, j) = b == 0.0 ? X(i, j) : X(i, j) + rng.laplace(b);
    }
  return out;
}

AutoencoderResult train_autoencoder(const Matrix& train_X, Index z_dim,
                                    const std::vector<Index>& hidden, Index epochs,
                                    Index batch_size, const AdamConfig& adam,
                                    std::uint64_t seed) {
  if (train_X.rows() < 2) throw DataError("autoencoder: need at least 2 training rows");
  if (batch_size < 2 || batch_size > train_X.rows())
    throw ConfigError("autoencoder: batch_size " + std::to_string(batch_size) +
                      " outside [2, " + std::to_string(train_X.rows()) + "]");
  if (epochs < 1) throw ConfigError("autoencoder: epochs must be >= 1");

  RngPool pool(seed);
  RngStream er = pool.stream("encoder-init");
  RngStream dr = pool.stream("decoder-init");
  AutoencoderResult result;
  result.encoder = Mlp(ModelSpec::dense(train_X.cols(), hidden, z_dim), er);
  std::vector<Index> mirrored(hidden.rbegin(), hidden.rend());
  result.decoder = Mlp(ModelSpec::dense(z_dim, mirrored, train_X.cols()), dr);

  std::vector<Tensor> params = result.encoder.params();
  for (const auto& p : result.decoder.params()) params.push_back(p);
  Adam opt(params, adam);

  RngStream shuffle = pool.stream("batches");
  Index n_batches = train_X.rows() / batch_size;
  for (Index e = 0; e < epochs; ++e) {
    auto perm = shuffle.permutation(train_X.rows());
    for (Index b = 0; b < n_batches; ++b) {
      Matrix xb(batch_size, train_X.cols());
      for (Index r = 0; r < batch_size; ++r)
        xb.row(r) = train_X.row(perm[static_cast<std::size_t>(b * batch_size + r)]);
      Tensor x = Tensor::constant(std::move(xb));
      zero_grads(params);
      Tensor recon = result.decoder.forward(result.encoder.forward(x));
      Tensor diff = sub(recon, x);
      Tensor loss = mean(mul(diff, diff));
      loss.backward();
      opt.step();
    }
  }

  Matrix recon = map_features(result.decoder, map_features(result.encoder, train_X));
  result.train_mse = (recon - train_X).array().square().mean();
  return result;
}

Pca Pca::fit(const Matrix& X, Index k) {
  if (X.rows() < 2) throw DataError("pca: need at least 2 rows to fit");
  if (k < 1 || k > X.cols())
    throw ConfigError("pca: k " + std::to_string(k) + " outside [1, " +
                      std::to_string(X.cols()) + "]");
  Pca pca;
  auto n = static_cast<double>(X.rows());
  pca.mean = X.colwise().sum() / n;
  Matrix centered = X - pca.mean.replicate(X.rows(), 1);
  Matrix cov = (centered.transpose() * centered) / n;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(cov);
  if (solver.info() != Eigen::Success)
    throw ContractError("pca: eigendecomposition failed to converge");
  Index d = X.cols();
  pca.components.resize(d, k);
  pca.eigenvalues.resize(static_cast<std::size_t>(k));
  for (Index c = 0; c < k; ++c) {
    Index src = d - 1 - c;  // solver sorts ascending
    Matrix v = solver.eigenvectors().col(src);
    Index peak = 0;
    for (Index r = 1; r < d; ++r)
      if (std::abs(v(r, 0)) > std::abs(v(peak, 0))) peak = r;
    if (v(peak, 0) < 0.0) v = -v;
    pca.components.col(c) = v;
    pca.eigenvalues[static_cast<std::size_t>(c)] =
        std::max(0.0, solver.eigenvalues()(src));
  }
  return pca;
}

Matrix Pca::transform(const Matrix& X) const {
  if (X.cols() != mean.cols())
    throw ShapeError("pca: fitted on width " + std::to_string(mean.cols()) + ", got " +
                     shape_str(X.rows(), X.cols()));
  return (X - mean.replicate(X.rows(), 1)) * components;
}

BaselineKind baseline_kind_from_name(const std::string& name) {
  if (name == "noisy") return BaselineKind::noisy;
  if (name == "dp") return BaselineKind::dp;
  if (name == "encoder") return BaselineKind::encoder;
  if (name == "hybrid") return BaselineKind::hybrid;
  throw ConfigError("unknown baseline '" + name +
                    "' (expected noisy, dp, encoder or hybrid)");
}

std::string baseline_kind_name(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::noisy: return "noisy";
    case BaselineKind::dp: return "dp";
    case BaselineKind::encoder: return "encoder";
    case BaselineKind::hybrid: return "hybrid";
  }
  throw ContractError("unreachable baseline kind");
}

void validate_config(const BaselineConfig& config, Index data_dim) {
  if (data_dim < 1) throw ConfigError("baseline: empty feature space");
  switch (config.kind) {
    case BaselineKind::noisy:
      if (config.sigma <= 0.0) throw ConfigError("baseline: sigma must be positive");
      break;
    case BaselineKind::dp:
      if (config.epsilon <= 0.0) throw ConfigError("baseline: epsilon must be positive");
      break;
    case BaselineKind::encoder:
      if (config.z_dim < 1) throw ConfigError("baseline: z_dim must be positive");
      break;
    case BaselineKind::hybrid:
      if (config.epsilon <= 0.0) throw ConfigError("baseline: epsilon must be positive");
      if (config.z_dim < 1) throw ConfigError("baseline: z_dim must be positive");
      if (config.retained_dim < 1 || config.retained_dim > config.z_dim)
        throw ConfigError("baseline: retained_dim " + std::to_string(config.retained_dim) +
                          " outside [1, " + std::to_string(config.z_dim) + "]");
      break;
  }
}

BaselineFeatures run_baseline(const LabeledDataset& data, const BaselineConfig& config) {
  data.validate();
  validate_config(config, data.dim());
  RngPool pool(config.seed);
  BaselineFeatures out;
  switch (config.kind) {
    case BaselineKind::noisy: {
      RngStream rng = pool.stream("noise");
      Matrix Z = noisy_transform(data.X, config.sigma, rng);
      out.train_Z = Z.topRows(data.train_rows);
      out.eval_Z = Z.bottomRows(data.eval_rows());
      out.method = "noisy sigma=" + str_g(config.sigma);
      break;
    }
    case BaselineKind::dp: {
      RngStream rng = pool.stream("noise");
      Matrix Z = dp_transform(data.X, data.train_X(), config.epsilon, rng, &out.warnings);
      out.train_Z = Z.topRows(data.train_rows);
      out.eval_Z = Z.bottomRows(data.eval_rows());
      out.method = "dp eps=" + str_g(config.epsilon);
      break;
    }
    case BaselineKind::encoder: {
      auto ae = train_autoencoder(data.train_X(), config.z_dim, config.encoder_hidden,
                                  config.epochs, config.batch_size, config.adam,
                                  pool.derive("autoencoder"));
      out.train_Z = map_features(ae.encoder, data.train_X());
      out.eval_Z = map_features(ae.encoder, data.eval_X());
      out.recon_mse = ae.train_mse;
      out.method = "encoder";
      break;
    }
    case BaselineKind::hybrid: {
      auto ae = train_autoencoder(data.train_X(), config.z_dim, config.encoder_hidden,
                                  config.epochs, config.batch_size, config.adam,
                                  pool.derive("autoencoder"));
      Matrix enc_train = map_features(ae.encoder, data.train_X());
      Matrix enc_eval = map_features(ae.encoder, data.eval_X());
      Pca pca = Pca::fit(enc_train, config.retained_dim);
      Matrix proj_train = pca.transform(enc_train);
      Matrix proj_eval = pca.transform(enc_eval);
      RngStream rng = pool.stream("noise");
      Matrix all(proj_train.rows() + proj_eval.rows(), proj_train.cols());
      all.topRows(proj_train.rows()) = proj_train;
      all.bottomRows(proj_eval.rows()) = proj_eval;
      Matrix Z = dp_transform(all, proj_train, config.epsilon, rng, &out.warnings);
      out.train_Z = Z.topRows(proj_train.rows());
      out.eval_Z = Z.bottomRows(proj_eval.rows());
      out.recon_mse = ae.train_mse;
      out.method =
          "hybrid eps=" + str_g(config.epsilon) + " k=" + std::to_string(config.retained_dim);
      break;
    }
  }
  return out;
}

}  // namespace tiprdc
