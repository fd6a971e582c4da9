#include "tiprdc/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace tiprdc {

namespace {

std::vector<int> slice_labels(const std::vector<int>& v, Index start, Index count) {
  return std::vector<int>(v.begin() + start, v.begin() + start + count);
}

void hash_u64(std::uint64_t v, std::uint64_t& h) {
  h = fnv1a64(&v, sizeof(v), h);
}

void hash_labels(const std::vector<int>& v, std::uint64_t& h) {
  for (int x : v) {
    auto x32 = static_cast<std::int32_t>(x);
    h = fnv1a64(&x32, sizeof(x32), h);
  }
}

}  // namespace

std::vector<int> LabeledDataset::train_u() const { return slice_labels(u, 0, train_rows); }
std::vector<int> LabeledDataset::eval_u() const {
  return slice_labels(u, train_rows, eval_rows());
}
std::vector<int> LabeledDataset::train_y() const { return slice_labels(y, 0, train_rows); }
std::vector<int> LabeledDataset::eval_y() const {
  return slice_labels(y, train_rows, eval_rows());
}

void LabeledDataset::validate() const {
  if (X.rows() == 0 || X.cols() == 0)
    throw DataError("dataset: no records (X is " + shape_str(X.rows(), X.cols()) + ")");
  if (static_cast<Index>(u.size()) != X.rows())
    throw DataError("dataset: " + std::to_string(X.rows()) + " rows but " +
                    std::to_string(u.size()) + " private labels");
  if (u_classes < 2) throw DataError("dataset: u_classes must be at least 2");
  for (std::size_t i = 0; i < u.size(); ++i)
    if (u[i] < 0 || u[i] >= u_classes)
      throw DataError("dataset: private label " + std::to_string(u[i]) + " at row " +
                      std::to_string(i) + " outside [0, " + std::to_string(u_classes) + ")");
  if (has_y()) {
    if (static_cast<Index>(y.size()) != X.rows())
      throw DataError("dataset: " + std::to_string(X.rows()) + " rows but " +
                      std::to_string(y.size()) + " utility labels");
    if (y_classes < 2) throw DataError("dataset: y_classes must be at least 2");
    for (std::size_t i = 0; i < y.size(); ++i)
      if (y[i] < 0 || y[i] >= y_classes)
        throw DataError("dataset: utility label " + std::to_string(y[i]) + " at row " +
                        std::to_string(i) + " outside [0, " + std::to_string(y_classes) + ")");
  } else if (!y.empty()) {
    throw DataError("dataset: utility labels present but y_classes is 0");
  }
  if (train_rows < 1 || train_rows > X.rows())
    throw DataError("dataset: train_rows " + std::to_string(train_rows) +
                    " outside [1, " + std::to_string(X.rows()) + "]");
}

std::uint64_t fingerprint(const LabeledDataset& data) {
  std::uint64_t h = kFnvOffsetBasis;
  hash_u64(static_cast<std::uint64_t>(data.X.rows()), h);
  hash_u64(static_cast<std::uint64_t>(data.X.cols()), h);
  hash_u64(static_cast<std::uint64_t>(data.u_classes), h);
  hash_u64(static_cast<std::uint64_t>(data.y_classes), h);
  hash_u64(static_cast<std::uint64_t>(data.train_rows), h);
  h = fnv1a64(data.X.data(), sizeof(double) * static_cast<std::size_t>(data.X.size()), h);
  hash_labels(data.u, h);
  hash_labels(data.y, h);
  return h;
}

void validate_spec(const SyntheticSpec& spec) {
  if (spec.w_u < 1 || spec.w_y < 1 || spec.w_noise < 1)
    throw ConfigError("synthetic spec: block widths must be positive");
  if (spec.p_u < 0.0 || spec.p_u >= 0.5 || spec.p_y < 0.0 || spec.p_y >= 0.5)
    throw ConfigError("synthetic spec: flip probabilities must lie in [0, 0.5)");
  if (spec.rho < 0.0 || spec.rho >= 1.0)
    throw ConfigError("synthetic spec: rho must lie in [0, 1)");
  if (spec.jitter < 0.0) throw ConfigError("synthetic spec: jitter must be >= 0");
  if (spec.train_rows < 2 || spec.eval_rows < 1)
    throw ConfigError("synthetic spec: need at least 2 train and 1 eval rows");
}

LabeledDataset make_synthetic(const SyntheticSpec& spec, std::uint64_t seed,
                              const std::string& name) {
  validate_spec(spec);
  Index n = spec.train_rows + spec.eval_rows;
  Index d = spec.w_u + spec.w_y + spec.w_noise;
  LabeledDataset data;
  data.X.resize(n, d);
  data.u.resize(static_cast<std::size_t>(n));
  data.y.resize(static_cast<std::size_t>(n));
  data.u_classes = 2;
  data.y_classes = 2;
  data.train_rows = spec.train_rows;

  RngPool pool(seed);
  RngStream rng = pool.stream("synthetic");
  double mix_y = std::sqrt(1.0 - spec.rho * spec.rho);
  for (Index i = 0; i < n; ++i) {
    int ui = rng.uniform() < 0.5 ? 0 : 1;
    int yi = rng.uniform() < 0.5 ? 0 : 1;
    double flip_u = rng.uniform() < spec.p_u ? -1.0 : 1.0;
    double flip_y = rng.uniform() < spec.p_y ? -1.0 : 1.0;
    double base_u = (2.0 * ui - 1.0) * flip_u;
    double base_y = mix_y * (2.0 * yi - 1.0) * flip_y + spec.rho * base_u;
    data.u[static_cast<std::size_t>(i)] = ui;
    data.y[static_cast<std::size_t>(i)] = yi;
    Index c = 0;
    for (Index j = 0; j < spec.w_u; ++j, ++c)
      data.X(i, c) = base_u + spec.jitter * rng.normal();
    for (Index j = 0; j < spec.w_y; ++j, ++c)
      data.X(i, c) = base_y + spec.jitter * rng.normal();
    for (Index j = 0; j < spec.w_noise; ++j, ++c) data.X(i, c) = rng.normal();
  }

  std::ostringstream prov;
  prov << name << " w=" << spec.w_u << "/" << spec.w_y << "/" << spec.w_noise
       << " p_u=" << spec.p_u << " p_y=" << spec.p_y << " rho=" << spec.rho
       << " seed=" << seed;
  data.provenance = prov.str();
  data.validate();
  return data;
}

SyntheticSpec synthetic_preset(const std::string& name) {
  if (name == "family-a") {
    return SyntheticSpec{};  // defaults: 4/4/8, p_u = p_y = 0.1, rho = 0
  }
  if (name == "family-b") {
    SyntheticSpec spec;
    spec.w_u = 6;
    spec.w_y = 3;
    spec.w_noise = 15;
    spec.p_u = 0.15;
    spec.p_y = 0.05;
    spec.rho = 0.3;
    return spec;
  }
  throw ConfigError("unknown synthetic preset '" + name +
                    "' (expected family-a or family-b)");
}

LabeledDataset make_gaussian(Index dim, Index train_rows, Index eval_rows,
                             std::uint64_t seed) {
  if (dim < 1 || train_rows < 2 || eval_rows < 1)
    throw ConfigError("gaussian dataset: bad dimensions");
  Index n = train_rows + eval_rows;
  LabeledDataset data;
  data.X.resize(n, dim);
  data.u.resize(static_cast<std::size_t>(n));
  data.u_classes = 2;
  data.y_classes = 0;
  data.train_rows = train_rows;
  RngPool pool(seed);
  RngStream rng = pool.stream("gaussian");
  for (Index i = 0; i < n; ++i) {
    data.u[static_cast<std::size_t>(i)] = rng.uniform() < 0.5 ? 0 : 1;
    for (Index j = 0; j < dim; ++j) data.X(i, j) = rng.normal();
  }
  std::ostringstream prov;
  prov << "gaussian d=" << dim << " seed=" << seed;
  data.provenance = prov.str();
  data.validate();
  return data;
}

Standardizer Standardizer::fit(const Matrix& X) {
  if (X.rows() < 2) throw DataError("standardizer: need at least 2 rows to fit");
  Standardizer s;
  auto n = static_cast<double>(X.rows());
  s.mean = X.colwise().sum() / n;
  Matrix centered = X - s.mean.replicate(X.rows(), 1);
  Matrix var = centered.array().square().matrix().colwise().sum() / n;
  s.scale.resize(1, X.cols());
  for (Index j = 0; j < X.cols(); ++j) {
    double sd = std::sqrt(var(0, j));
    s.scale(0, j) = sd < 1e-12 ? 1.0 : sd;
  }
  return s;
}

Matrix Standardizer::apply(const Matrix& X) const {
  if (X.cols() != mean.cols())
    throw ShapeError("standardizer: fitted on width " + std::to_string(mean.cols()) +
                     ", got " + shape_str(X.rows(), X.cols()));
  Matrix out = X - mean.replicate(X.rows(), 1);
  return out.cwiseQuotient(scale.replicate(X.rows(), 1));
}

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

double parse_double(const std::string& cell, std::size_t row, const std::string& col) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size())
    throw DataError("csv row " + std::to_string(row) + ", column '" + col +
                    "': cannot parse '" + cell + "' as a number");
  return v;
}

int parse_label(const std::string& cell, std::size_t row, const std::string& col,
                int classes) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size())
    throw DataError("csv row " + std::to_string(row) + ", column '" + col +
                    "': cannot parse '" + cell + "' as a label");
  if (v < 0 || v >= classes)
    throw DataError("csv row " + std::to_string(row) + ", column '" + col + "': label " +
                    std::to_string(v) + " outside [0, " + std::to_string(classes) + ")");
  return v;
}

}  // namespace

LabeledDataset load_csv(const std::string& path, const CsvSchema& schema) {
  if (schema.u_column.empty()) throw ConfigError("csv schema: u_column is required");
  if (schema.u_classes < 2) throw ConfigError("csv schema: u_classes must be at least 2");
  bool want_y = !schema.y_column.empty();
  if (want_y && schema.y_classes < 2)
    throw ConfigError("csv schema: y_classes must be at least 2 when y_column is set");
  if (schema.train_fraction <= 0.0 || schema.train_fraction >= 1.0)
    throw ConfigError("csv schema: train_fraction must lie in (0, 1)");

  std::ifstream in(path);
  if (!in) throw DataError("cannot open csv file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError("csv file '" + path + "' is empty");
  auto header = split_line(line);
  if (header.size() < 2) throw DataError("csv header needs at least 2 columns");

  Index u_col = -1;
  Index y_col = -1;
  std::vector<Index> feature_cols;
  std::vector<std::string> feature_names;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == schema.u_column) {
      u_col = static_cast<Index>(j);
    } else if (want_y && header[j] == schema.y_column) {
      y_col = static_cast<Index>(j);
    } else {
      feature_cols.push_back(static_cast<Index>(j));
      feature_names.push_back(header[j]);
    }
  }
  if (u_col < 0)
    throw DataError("csv: column '" + schema.u_column + "' not found in header");
  if (want_y && y_col < 0)
    throw DataError("csv: column '" + schema.y_column + "' not found in header");
  if (feature_cols.empty()) throw DataError("csv: no feature columns left");

  std::vector<std::vector<double>> rows;
  std::vector<int> u_vals;
  std::vector<int> y_vals;
  std::size_t row_no = 0;
  while (std::getline(in, line)) {
    ++row_no;
    if (trim(line).empty()) continue;
    auto cells = split_line(line);
    if (cells.size() != header.size())
      throw DataError("csv row " + std::to_string(row_no) + ": expected " +
                      std::to_string(header.size()) + " cells, got " +
                      std::to_string(cells.size()));
    std::vector<double> feats;
    feats.reserve(feature_cols.size());
    for (std::size_t k = 0; k < feature_cols.size(); ++k)
      feats.push_back(parse_double(cells[static_cast<std::size_t>(feature_cols[k])],
                                   row_no, feature_names[k]));
    rows.push_back(std::move(feats));
    u_vals.push_back(parse_label(cells[static_cast<std::size_t>(u_col)], row_no,
                                 schema.u_column, schema.u_classes));
    if (want_y)
      y_vals.push_back(parse_label(cells[static_cast<std::size_t>(y_col)], row_no,
                                   schema.y_column, schema.y_classes));
  }
  if (rows.size() < 2) throw DataError("csv: need at least 2 data rows");

  LabeledDataset data;
  auto n = static_cast<Index>(rows.size());
  auto d = static_cast<Index>(feature_cols.size());
  data.X.resize(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j)
      data.X(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  data.u = std::move(u_vals);
  data.y = std::move(y_vals);
  data.u_classes = schema.u_classes;
  data.y_classes = want_y ? schema.y_classes : 0;
  data.train_rows =
      std::clamp<Index>(static_cast<Index>(std::floor(n * schema.train_fraction)), 1, n - 1);
  if (schema.standardize) {
    Standardizer s = Standardizer::fit(data.X.topRows(data.train_rows));
    data.X = s.apply(data.X);
  }
  data.provenance = "csv u='" + schema.u_column + "'" +
                    (want_y ? " y='" + schema.y_column + "'" : "");
  data.validate();
  return data;
}

void save_csv(const std::string& path, const LabeledDataset& data) {
  data.validate();
  std::ofstream out(path);
  if (!out) throw DataError("cannot write csv file '" + path + "'");
  for (Index j = 0; j < data.dim(); ++j) out << "f" << j << ",";
  out << "u";
  if (data.has_y()) out << ",y";
  out << "\n";
  char buf[40];
  for (Index i = 0; i < data.rows(); ++i) {
    for (Index j = 0; j < data.dim(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", data.X(i, j));
      out << buf << ",";
    }
    out << data.u[static_cast<std::size_t>(i)];
    if (data.has_y()) out << "," << data.y[static_cast<std::size_t>(i)];
    out << "\n";
  }
  if (!out) throw DataError("failed writing csv file '" + path + "'");
}

BatchStream::BatchStream(const LabeledDataset& data, Split split, Index batch_size,
                         std::uint64_t seed)
    : data_(&data), split_(split), batch_size_(batch_size), seed_(seed) {
  data.validate();
  if (batch_size < 2)
    throw DataError("batch stream: batch_size must be at least 2, got " +
                    std::to_string(batch_size));
  split_rows_ = split == Split::train ? data.train_rows : data.eval_rows();
  offset_ = split == Split::train ? 0 : data.train_rows;
  if (split_rows_ < batch_size)
    throw DataError("batch stream: split has " + std::to_string(split_rows_) +
                    " rows, smaller than batch_size " + std::to_string(batch_size));
}

std::vector<BatchStream::Batch> BatchStream::epoch(Index e) const {
  RngPool pool(seed_);
  RngStream rng = pool.stream("epoch", static_cast<std::uint64_t>(e));
  auto perm = rng.permutation(split_rows_);
  Index n_batches = batches_per_epoch();
  std::vector<Batch> out;
  out.reserve(static_cast<std::size_t>(n_batches));
  bool has_y = data_->has_y();
  for (Index b = 0; b < n_batches; ++b) {
    Batch batch;
    batch.X.resize(batch_size_, data_->dim());
    batch.u.resize(static_cast<std::size_t>(batch_size_));
    if (has_y) batch.y.resize(static_cast<std::size_t>(batch_size_));
    for (Index r = 0; r < batch_size_; ++r) {
      Index src = offset_ + perm[static_cast<std::size_t>(b * batch_size_ + r)];
      batch.X.row(r) = data_->X.row(src);
      batch.u[static_cast<std::size_t>(r)] = data_->u[static_cast<std::size_t>(src)];
      if (has_y)
        batch.y[static_cast<std::size_t>(r)] = data_->y[static_cast<std::size_t>(src)];
    }
    out.push_back(std::move(batch));
  }
  return out;
}

}  // namespace tiprdc
