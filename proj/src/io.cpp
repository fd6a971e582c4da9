#include "tiprdc/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <utility>

namespace tiprdc {

static_assert(std::endian::native == std::endian::little,
              "binary formats are written little-endian");

namespace {

using nlohmann::json;

constexpr std::uint32_t kFormatVersion = 1;

// ---- low-level binary helpers ----------------------------------------------

void put_bytes(std::ostream& out, const void* data, std::size_t size) {
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
}

void put_u32(std::ostream& out, std::uint32_t v) { put_bytes(out, &v, sizeof(v)); }
void put_u64(std::ostream& out, std::uint64_t v) { put_bytes(out, &v, sizeof(v)); }

void get_bytes(std::istream& in, void* data, std::size_t size, const std::string& path) {
  in.read(static_cast<char*>(data), static_cast<std::streamsize>(size));
  if (static_cast<std::size_t>(in.gcount()) != size)
    throw DataError("file '" + path + "' is truncated");
}

struct ArrayRef {
  std::string name;
  std::string dtype;  // "f64" or "i32"
  const Matrix* f64 = nullptr;
  const std::vector<int>* i32 = nullptr;
};

json manifest_of(const std::vector<ArrayRef>& arrays) {
  json m = json::array();
  for (const auto& a : arrays) {
    json e;
    e["name"] = a.name;
    e["dtype"] = a.dtype;
    if (a.f64) {
      e["rows"] = a.f64->rows();
      e["cols"] = a.f64->cols();
    } else {
      e["rows"] = static_cast<Index>(a.i32->size());
      e["cols"] = Index{1};
    }
    m.push_back(std::move(e));
  }
  return m;
}

void write_blob(const std::string& path, const char magic[4], json header,
                const std::vector<ArrayRef>& arrays) {
  header["arrays"] = manifest_of(arrays);
  std::string header_bytes = header.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file '" + path + "'");
  put_bytes(out, magic, 4);
  put_u32(out, kFormatVersion);
  put_u64(out, header_bytes.size());
  put_bytes(out, header_bytes.data(), header_bytes.size());
  for (const auto& a : arrays) {
    if (a.f64) {
      put_bytes(out, a.f64->data(), sizeof(double) * static_cast<std::size_t>(a.f64->size()));
    } else {
      for (int v : *a.i32) {
        auto v32 = static_cast<std::int32_t>(v);
        put_bytes(out, &v32, sizeof(v32));
      }
    }
  }
  if (!out) throw DataError("failed writing file '" + path + "'");
}

struct LoadedBlob {
  json header;
  std::map<std::string, Matrix> f64;
  std::map<std::string, std::vector<int>> i32;
};

LoadedBlob read_blob(const std::string& path, const char magic[4]) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file '" + path + "'");
  char got[4];
  get_bytes(in, got, 4, path);
  if (std::memcmp(got, magic, 4) != 0)
    throw DataError("file '" + path + "' has wrong magic, expected " +
                    std::string(magic, 4));
  std::uint32_t version = 0;
  get_bytes(in, &version, sizeof(version), path);
  if (version != kFormatVersion)
    throw DataError("file '" + path + "': unsupported version " + std::to_string(version));
  std::uint64_t header_len = 0;
  get_bytes(in, &header_len, sizeof(header_len), path);
  if (header_len > (1ull << 30))
    throw DataError("file '" + path + "': implausible header length");
  std::string header_bytes(header_len, '\0');
  get_bytes(in, header_bytes.data(), header_len, path);
  LoadedBlob blob;
  try {
    blob.header = json::parse(header_bytes);
  } catch (const json::exception& e) {
    throw DataError("file '" + path + "': bad header: " + e.what());
  }
  if (!blob.header.contains("arrays") || !blob.header["arrays"].is_array())
    throw DataError("file '" + path + "': header has no array manifest");
  for (const auto& e : blob.header["arrays"]) {
    std::string name = e.at("name").get<std::string>();
    std::string dtype = e.at("dtype").get<std::string>();
    auto rows = e.at("rows").get<Index>();
    auto cols = e.at("cols").get<Index>();
    if (rows < 0 || cols < 0)
      throw DataError("file '" + path + "': array '" + name + "' has negative shape");
    if (dtype == "f64") {
      Matrix m(rows, cols);
      get_bytes(in, m.data(), sizeof(double) * static_cast<std::size_t>(m.size()), path);
      blob.f64.emplace(std::move(name), std::move(m));
    } else if (dtype == "i32") {
      if (cols != 1)
        throw DataError("file '" + path + "': i32 array '" + name + "' must have 1 column");
      std::vector<int> v(static_cast<std::size_t>(rows));
      for (auto& x : v) {
        std::int32_t x32 = 0;
        get_bytes(in, &x32, sizeof(x32), path);
        x = x32;
      }
      blob.i32.emplace(std::move(name), std::move(v));
    } else {
      throw DataError("file '" + path + "': unknown dtype '" + dtype + "'");
    }
  }
  return blob;
}

// ---- spec serialization ------------------------------------------------------

json to_json_spec(const ModelSpec& spec) {
  json j;
  j["input_dim"] = spec.input_dim;
  j["hidden"] = spec.hidden;
  j["output_dim"] = spec.output_dim;
  j["activations"] = spec.activations;
  return j;
}

ModelSpec model_spec_from_json(const json& j) {
  ModelSpec spec;
  spec.input_dim = j.at("input_dim").get<Index>();
  spec.hidden = j.at("hidden").get<std::vector<Index>>();
  spec.output_dim = j.at("output_dim").get<Index>();
  spec.activations = j.at("activations").get<std::vector<std::string>>();
  validate_spec(spec);
  return spec;
}

json to_json_spec(const CriticSpec& spec) {
  json j;
  j["x_dim"] = spec.x_dim;
  j["z_dim"] = spec.z_dim;
  j["u_classes"] = spec.u_classes;
  j["hidden"] = spec.hidden;
  j["z_layer"] = spec.z_layer;
  j["u_layer"] = spec.u_layer;
  return j;
}

CriticSpec critic_spec_from_json(const json& j) {
  CriticSpec spec;
  spec.x_dim = j.at("x_dim").get<Index>();
  spec.z_dim = j.at("z_dim").get<Index>();
  spec.u_classes = j.at("u_classes").get<int>();
  spec.hidden = j.at("hidden").get<std::vector<Index>>();
  spec.z_layer = j.at("z_layer").get<std::size_t>();
  spec.u_layer = j.at("u_layer").get<std::size_t>();
  validate_spec(spec);
  return spec;
}

void collect_layer_arrays(const std::string& prefix, const std::vector<DenseLayer>& layers,
                          std::vector<ArrayRef>& out) {
  for (std::size_t i = 0; i < layers.size(); ++i) {
    out.push_back({prefix + "." + std::to_string(i) + ".weight", "f64",
                   &layers[i].weight.value(), nullptr});
    out.push_back({prefix + "." + std::to_string(i) + ".bias", "f64",
                   &layers[i].bias.value(), nullptr});
  }
}

void restore_layer_arrays(const std::string& prefix, std::vector<DenseLayer>& layers,
                          std::map<std::string, Matrix>& arrays, const std::string& path) {
  for (std::size_t i = 0; i < layers.size(); ++i) {
    for (const char* part : {"weight", "bias"}) {
      std::string name = prefix + "." + std::to_string(i) + "." + part;
      auto it = arrays.find(name);
      if (it == arrays.end())
        throw DataError("file '" + path + "': missing array '" + name + "'");
      Tensor& target = part == std::string("weight") ? layers[i].weight : layers[i].bias;
      if (it->second.rows() != target.rows() || it->second.cols() != target.cols())
        throw DataError("file '" + path + "': array '" + name + "' is " +
                        shape_str(it->second.rows(), it->second.cols()) + ", expected " +
                        shape_str(target.rows(), target.cols()));
      target.value() = it->second;
      arrays.erase(it);
    }
  }
}

void check_keys(const json& j, const std::set<std::string>& allowed, const char* what) {
  if (!j.is_object()) throw ConfigError(std::string(what) + ": expected a JSON object");
  for (const auto& [key, value] : j.items())
    if (!allowed.contains(key))
      throw ConfigError(std::string(what) + ": unknown key '" + key + "'");
}

json json_or_null(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

std::string fmt_or_dash(double v, const char* fmt = "%.4f") {
  if (std::isnan(v)) return "-";
  char buf[32];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

std::string hidden_str(const std::vector<Index>& hidden) {
  std::string s;
  for (std::size_t i = 0; i < hidden.size(); ++i) {
    if (i) s += "-";
    s += std::to_string(hidden[i]);
  }
  return s.empty() ? "linear" : s;
}

}  // namespace

// ---- checkpoints -------------------------------------------------------------

void save_checkpoint(const std::string& path, const TrainedModels& models) {
  json header;
  header["kind"] = "checkpoint";
  header["config"] = to_json(models.config);
  header["extractor_spec"] = to_json_spec(models.extractor.spec());
  header["classifier_spec"] = to_json_spec(models.classifier.spec());
  header["critic_spec"] = to_json_spec(models.critic.spec());
  header["data_fingerprint"] = hex64(models.data_fingerprint);
  std::vector<ArrayRef> arrays;
  collect_layer_arrays("extractor", models.extractor.layers(), arrays);
  collect_layer_arrays("classifier", models.classifier.layers(), arrays);
  collect_layer_arrays("critic", models.critic.layers(), arrays);
  write_blob(path, "TPRC", std::move(header), arrays);
}

TrainedModels load_checkpoint(const std::string& path) {
  LoadedBlob blob = read_blob(path, "TPRC");
  TrainedModels models;
  try {
    models.config = train_config_from_json(blob.header.at("config"));
    RngStream dummy(0);
    models.extractor =
        Mlp(model_spec_from_json(blob.header.at("extractor_spec")), dummy);
    models.classifier =
        Mlp(model_spec_from_json(blob.header.at("classifier_spec")), dummy);
    models.critic = Critic(critic_spec_from_json(blob.header.at("critic_spec")), dummy);
    models.data_fingerprint =
        std::stoull(blob.header.at("data_fingerprint").get<std::string>(), nullptr, 16);
  } catch (const json::exception& e) {
    throw DataError("file '" + path + "': bad checkpoint header: " + e.what());
  }
  restore_layer_arrays("extractor", models.extractor.layers(), blob.f64, path);
  restore_layer_arrays("classifier", models.classifier.layers(), blob.f64, path);
  restore_layer_arrays("critic", models.critic.layers(), blob.f64, path);
  if (!blob.f64.empty())
    throw DataError("file '" + path + "': unexpected array '" +
                    blob.f64.begin()->first + "'");
  return models;
}

// ---- feature files -----------------------------------------------------------

FeatureFile make_feature_file(const LabeledDataset& data, const std::string& method,
                              const Matrix& train_Z, const Matrix& eval_Z,
                              double lambda, double mi_bound) {
  data.validate();
  if (train_Z.rows() != data.train_rows || eval_Z.rows() != data.eval_rows())
    throw ShapeError("feature file: split sizes " + std::to_string(train_Z.rows()) +
                     "/" + std::to_string(eval_Z.rows()) + " do not match dataset " +
                     std::to_string(data.train_rows) + "/" +
                     std::to_string(data.eval_rows()));
  if (train_Z.cols() != eval_Z.cols())
    throw ShapeError("feature file: train width " + std::to_string(train_Z.cols()) +
                     " vs eval width " + std::to_string(eval_Z.cols()));
  FeatureFile f;
  f.method = method;
  f.lambda = lambda;
  f.mi_bound = mi_bound;
  f.train_Z = train_Z;
  f.eval_Z = eval_Z;
  f.train_u = data.train_u();
  f.eval_u = data.eval_u();
  if (data.has_y()) {
    f.train_y = data.train_y();
    f.eval_y = data.eval_y();
  }
  f.u_classes = data.u_classes;
  f.y_classes = data.y_classes;
  f.data_fingerprint = fingerprint(data);
  return f;
}

void save_features(const std::string& path, const FeatureFile& f) {
  json header;
  header["kind"] = "features";
  header["method"] = f.method;
  header["lambda"] = json_or_null(f.lambda);
  header["mi_bound"] = json_or_null(f.mi_bound);
  header["u_classes"] = f.u_classes;
  header["y_classes"] = f.y_classes;
  header["data_fingerprint"] = hex64(f.data_fingerprint);
  std::vector<ArrayRef> arrays;
  arrays.push_back({"train_Z", "f64", &f.train_Z, nullptr});
  arrays.push_back({"eval_Z", "f64", &f.eval_Z, nullptr});
  arrays.push_back({"train_u", "i32", nullptr, &f.train_u});
  arrays.push_back({"eval_u", "i32", nullptr, &f.eval_u});
  if (f.y_classes > 0) {
    arrays.push_back({"train_y", "i32", nullptr, &f.train_y});
    arrays.push_back({"eval_y", "i32", nullptr, &f.eval_y});
  }
  write_blob(path, "TFXF", std::move(header), arrays);
}

FeatureFile load_features(const std::string& path) {
  LoadedBlob blob = read_blob(path, "TFXF");
  FeatureFile f;
  try {
    f.method = blob.header.at("method").get<std::string>();
    f.lambda = blob.header.at("lambda").is_null()
                   ? std::numeric_limits<double>::quiet_NaN()
                   : blob.header.at("lambda").get<double>();
    f.mi_bound = blob.header.at("mi_bound").is_null()
                     ? std::numeric_limits<double>::quiet_NaN()
                     : blob.header.at("mi_bound").get<double>();
    f.u_classes = blob.header.at("u_classes").get<int>();
    f.y_classes = blob.header.at("y_classes").get<int>();
    f.data_fingerprint =
        std::stoull(blob.header.at("data_fingerprint").get<std::string>(), nullptr, 16);
  } catch (const json::exception& e) {
    throw DataError("file '" + path + "': bad feature header: " + e.what());
  }
  auto take_f64 = [&](const char* name) {
    auto it = blob.f64.find(name);
    if (it == blob.f64.end())
      throw DataError("file '" + path + "': missing array '" + std::string(name) + "'");
    Matrix m = std::move(it->second);
    blob.f64.erase(it);
    return m;
  };
  auto take_i32 = [&](const char* name) {
    auto it = blob.i32.find(name);
    if (it == blob.i32.end())
      throw DataError("file '" + path + "': missing array '" + std::string(name) + "'");
    std::vector<int> v = std::move(it->second);
    blob.i32.erase(it);
    return v;
  };
  f.train_Z = take_f64("train_Z");
  f.eval_Z = take_f64("eval_Z");
  f.train_u = take_i32("train_u");
  f.eval_u = take_i32("eval_u");
  if (f.y_classes > 0) {
    f.train_y = take_i32("train_y");
    f.eval_y = take_i32("eval_y");
  }
  if (!blob.f64.empty() || !blob.i32.empty())
    throw DataError("file '" + path + "': unexpected extra arrays");
  return f;
}

LabeledDataset dataset_from_features(const FeatureFile& f) {
  LabeledDataset data;
  data.X.resize(f.train_Z.rows() + f.eval_Z.rows(), f.train_Z.cols());
  data.X.topRows(f.train_Z.rows()) = f.train_Z;
  data.X.bottomRows(f.eval_Z.rows()) = f.eval_Z;
  data.u = f.train_u;
  data.u.insert(data.u.end(), f.eval_u.begin(), f.eval_u.end());
  if (f.y_classes > 0) {
    data.y = f.train_y;
    data.y.insert(data.y.end(), f.eval_y.begin(), f.eval_y.end());
  }
  data.u_classes = f.u_classes;
  data.y_classes = f.y_classes;
  data.train_rows = f.train_Z.rows();
  data.provenance = "features " + f.method;
  data.validate();
  return data;
}

// ---- traces -------------------------------------------------------------------

void write_trace(const std::string& path, const std::vector<PhaseRecord>& trace) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write trace file '" + path + "'");
  for (const auto& r : trace) {
    json j;
    j["step"] = r.step;
    j["epoch"] = r.epoch;
    j["phase"] = r.phase;
    j["classifier_loss"] = json_or_null(r.classifier_loss);
    j["mi_bound"] = json_or_null(r.mi_bound);
    j["combined"] = json_or_null(r.combined);
    out << j.dump() << "\n";
  }
  if (!out) throw DataError("failed writing trace file '" + path + "'");
}

// ---- configs ------------------------------------------------------------------

nlohmann::json to_json(const AdamConfig& config) {
  json j;
  j["lr"] = config.lr;
  j["beta1"] = config.beta1;
  j["beta2"] = config.beta2;
  j["eps"] = config.eps;
  j["decay"] = config.decay;
  j["decay_every"] = config.decay_every;
  return j;
}

AdamConfig adam_config_from_json(const nlohmann::json& j) {
  check_keys(j, {"lr", "beta1", "beta2", "eps", "decay", "decay_every"}, "adam config");
  AdamConfig c;
  try {
    c.lr = j.value("lr", c.lr);
    c.beta1 = j.value("beta1", c.beta1);
    c.beta2 = j.value("beta2", c.beta2);
    c.eps = j.value("eps", c.eps);
    c.decay = j.value("decay", c.decay);
    c.decay_every = j.value("decay_every", c.decay_every);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("adam config: ") + e.what());
  }
  return c;
}

nlohmann::json to_json(const TrainConfig& config) {
  json j;
  j["lambda"] = config.lambda;
  j["batch_size"] = config.batch_size;
  j["epochs"] = config.epochs;
  j["pretrain_epochs"] = config.pretrain_epochs;
  j["classifier_iters"] = config.classifier_iters;
  j["critic_iters"] = config.critic_iters;
  j["seed"] = config.seed;
  j["z_dim"] = config.z_dim;
  j["extractor_hidden"] = config.extractor_hidden;
  j["classifier_hidden"] = config.classifier_hidden;
  j["critic_hidden"] = config.critic_hidden;
  j["critic_z_layer"] = config.critic_z_layer;
  j["critic_u_layer"] = config.critic_u_layer;
  j["extractor_adam"] = to_json(config.extractor_adam);
  j["classifier_adam"] = to_json(config.classifier_adam);
  j["critic_adam"] = to_json(config.critic_adam);
  switch (config.phase3_terms) {
    case Phase3Terms::both: j["phase3_terms"] = "both"; break;
    case Phase3Terms::classifier_only: j["phase3_terms"] = "classifier_only"; break;
    case Phase3Terms::mi_only: j["phase3_terms"] = "mi_only"; break;
  }
  return j;
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  check_keys(j,
             {"lambda", "batch_size", "epochs", "pretrain_epochs", "classifier_iters",
              "critic_iters", "seed", "z_dim", "extractor_hidden", "classifier_hidden",
              "critic_hidden", "critic_z_layer", "critic_u_layer", "extractor_adam",
              "classifier_adam", "critic_adam", "phase3_terms"},
             "train config");
  TrainConfig c;
  try {
    c.lambda = j.value("lambda", c.lambda);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.epochs = j.value("epochs", c.epochs);
    c.pretrain_epochs = j.value("pretrain_epochs", c.pretrain_epochs);
    c.classifier_iters = j.value("classifier_iters", c.classifier_iters);
    c.critic_iters = j.value("critic_iters", c.critic_iters);
    c.seed = j.value("seed", c.seed);
    c.z_dim = j.value("z_dim", c.z_dim);
    c.extractor_hidden = j.value("extractor_hidden", c.extractor_hidden);
    c.classifier_hidden = j.value("classifier_hidden", c.classifier_hidden);
    c.critic_hidden = j.value("critic_hidden", c.critic_hidden);
    c.critic_z_layer = j.value("critic_z_layer", c.critic_z_layer);
    c.critic_u_layer = j.value("critic_u_layer", c.critic_u_layer);
    if (j.contains("extractor_adam"))
      c.extractor_adam = adam_config_from_json(j.at("extractor_adam"));
    if (j.contains("classifier_adam"))
      c.classifier_adam = adam_config_from_json(j.at("classifier_adam"));
    if (j.contains("critic_adam"))
      c.critic_adam = adam_config_from_json(j.at("critic_adam"));
    if (j.contains("phase3_terms")) {
      std::string t = j.at("phase3_terms").get<std::string>();
      if (t == "both")
        c.phase3_terms = Phase3Terms::both;
      else if (t == "classifier_only")
        c.phase3_terms = Phase3Terms::classifier_only;
      else if (t == "mi_only")
        c.phase3_terms = Phase3Terms::mi_only;
      else
        throw ConfigError("train config: unknown phase3_terms '" + t + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("train config: ") + e.what());
  }
  validate_config(c);
  return c;
}

nlohmann::json to_json(const EvalProtocol& proto) {
  json j;
  j["probe_hidden"] = proto.probe_hidden;
  j["probe_epochs"] = proto.probe_epochs;
  j["probe_batch"] = proto.probe_batch;
  j["probe_adam"] = to_json(proto.probe_adam);
  j["seeds"] = proto.seeds;
  j["standardize"] = proto.standardize;
  return j;
}

EvalProtocol protocol_from_json(const nlohmann::json& j) {
  check_keys(j,
             {"probe_hidden", "probe_epochs", "probe_batch", "probe_adam", "seeds",
              "standardize"},
             "protocol");
  EvalProtocol p;
  try {
    p.probe_hidden = j.value("probe_hidden", p.probe_hidden);
    p.probe_epochs = j.value("probe_epochs", p.probe_epochs);
    p.probe_batch = j.value("probe_batch", p.probe_batch);
    if (j.contains("probe_adam")) p.probe_adam = adam_config_from_json(j.at("probe_adam"));
    p.seeds = j.value("seeds", p.seeds);
    p.standardize = j.value("standardize", p.standardize);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("protocol: ") + e.what());
  }
  validate_protocol(p);
  return p;
}

nlohmann::json to_json(const BaselineConfig& config) {
  json j;
  j["kind"] = baseline_kind_name(config.kind);
  j["sigma"] = config.sigma;
  j["epsilon"] = config.epsilon;
  j["z_dim"] = config.z_dim;
  j["retained_dim"] = config.retained_dim;
  j["encoder_hidden"] = config.encoder_hidden;
  j["epochs"] = config.epochs;
  j["batch_size"] = config.batch_size;
  j["adam"] = to_json(config.adam);
  j["seed"] = config.seed;
  return j;
}

BaselineConfig baseline_config_from_json(const nlohmann::json& j) {
  check_keys(j,
             {"kind", "sigma", "epsilon", "z_dim", "retained_dim", "encoder_hidden",
              "epochs", "batch_size", "adam", "seed"},
             "baseline config");
  BaselineConfig c;
  try {
    if (j.contains("kind")) c.kind = baseline_kind_from_name(j.at("kind").get<std::string>());
    c.sigma = j.value("sigma", c.sigma);
    c.epsilon = j.value("epsilon", c.epsilon);
    c.z_dim = j.value("z_dim", c.z_dim);
    c.retained_dim = j.value("retained_dim", c.retained_dim);
    c.encoder_hidden = j.value("encoder_hidden", c.encoder_hidden);
    c.epochs = j.value("epochs", c.epochs);
    c.batch_size = j.value("batch_size", c.batch_size);
    if (j.contains("adam")) c.adam = adam_config_from_json(j.at("adam"));
    c.seed = j.value("seed", c.seed);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("baseline config: ") + e.what());
  }
  return c;
}

// ---- reports ------------------------------------------------------------------

nlohmann::json to_json(const TradeoffPoint& p) {
  json j;
  j["method"] = p.method;
  j["lambda"] = json_or_null(p.lambda);
  j["privacy_accuracy"] = p.privacy_acc;
  j["privacy_std"] = p.privacy_std;
  j["utility_accuracy"] = json_or_null(p.utility_acc);
  j["utility_std"] = json_or_null(p.utility_std);
  j["privacy_by_seed"] = p.privacy_by_seed;
  json util_seeds = json::array();
  for (double v : p.utility_by_seed) util_seeds.push_back(json_or_null(v));
  j["utility_by_seed"] = std::move(util_seeds);
  j["mi_bound"] = json_or_null(p.mi_bound);
  j["data_fingerprint"] = hex64(p.data_fingerprint);
  j["pareto_dominated"] = p.pareto_dominated;
  return j;
}

TradeoffPoint tradeoff_point_from_json(const nlohmann::json& j) {
  auto num_or_nan = [&](const char* key) {
    return j.at(key).is_null() ? std::numeric_limits<double>::quiet_NaN()
                               : j.at(key).get<double>();
  };
  TradeoffPoint p;
  try {
    p.method = j.at("method").get<std::string>();
    p.lambda = num_or_nan("lambda");
    p.privacy_acc = j.at("privacy_accuracy").get<double>();
    p.privacy_std = j.at("privacy_std").get<double>();
    p.utility_acc = num_or_nan("utility_accuracy");
    p.utility_std = num_or_nan("utility_std");
    p.privacy_by_seed = j.at("privacy_by_seed").get<std::vector<double>>();
    for (const auto& v : j.at("utility_by_seed"))
      p.utility_by_seed.push_back(v.is_null() ? std::numeric_limits<double>::quiet_NaN()
                                              : v.get<double>());
    p.mi_bound = num_or_nan("mi_bound");
    p.data_fingerprint =
        std::stoull(j.at("data_fingerprint").get<std::string>(), nullptr, 16);
    p.pareto_dominated = j.at("pareto_dominated").get<bool>();
  } catch (const json::exception& e) {
    throw DataError(std::string("bad tradeoff point json: ") + e.what());
  }
  return p;
}

nlohmann::json to_json(const Report& report) {
  json j;
  j["dataset"] = report.dataset;
  j["data_fingerprint"] = hex64(report.data_fingerprint);
  json points = json::array();
  for (const auto& p : report.points) points.push_back(to_json(p));
  j["points"] = std::move(points);
  json audit = json::array();
  for (const auto& row : report.audit) {
    json r;
    r["hidden"] = row.hidden;
    r["privacy_accuracy"] = row.privacy_acc;
    r["privacy_std"] = row.privacy_std;
    audit.push_back(std::move(r));
  }
  j["audit"] = std::move(audit);
  j["warnings"] = report.warnings;
  return j;
}

void write_report(const std::string& stem, const Report& report) {
  {
    std::ofstream out(stem + ".json");
    if (!out) throw DataError("cannot write report '" + stem + ".json'");
    out << to_json(report).dump(2) << "\n";
  }

  {
    std::ofstream out(stem + ".txt");
    if (!out) throw DataError("cannot write report '" + stem + ".txt'");
    out << "dataset: " << report.dataset << "\n";
    out << "fingerprint: " << hex64(report.data_fingerprint) << "\n\n";
    char line[256];
    std::snprintf(line, sizeof(line), "%-26s %7s %9s %7s %9s %7s %9s %s\n", "method",
                  "lambda", "privacy", "+/-", "utility", "+/-", "mi_bound", "flags");
    out << line;
    for (const auto& p : report.points) {
      std::snprintf(line, sizeof(line), "%-26s %7s %9s %7s %9s %7s %9s %s\n",
                    p.method.c_str(), fmt_or_dash(p.lambda, "%.2f").c_str(),
                    fmt_or_dash(p.privacy_acc).c_str(), fmt_or_dash(p.privacy_std).c_str(),
                    fmt_or_dash(p.utility_acc).c_str(), fmt_or_dash(p.utility_std).c_str(),
                    fmt_or_dash(p.mi_bound).c_str(), p.pareto_dominated ? "dominated" : "");
      out << line;
    }
    if (!report.audit.empty()) {
      out << "\nadversary audit (worst case over architectures)\n";
      std::snprintf(line, sizeof(line), "%-26s %9s %7s\n", "architecture", "privacy", "+/-");
      out << line;
      for (const auto& row : report.audit) {
        std::snprintf(line, sizeof(line), "%-26s %9s %7s\n", hidden_str(row.hidden).c_str(),
                      fmt_or_dash(row.privacy_acc).c_str(),
                      fmt_or_dash(row.privacy_std).c_str());
        out << line;
      }
    }
    if (!report.warnings.empty()) {
      out << "\nwarnings\n";
      for (const auto& w : report.warnings) out << "  " << w << "\n";
    }
  }

  std::vector<const TradeoffPoint*> budget, other;
  for (const auto& p : report.points)
    (std::isnan(p.lambda) ? other : budget).push_back(&p);
  char buf[64];
  if (!budget.empty()) {
    std::ofstream out(stem + "_budget_series.csv");
    if (!out) throw DataError("cannot write series csv");
    out << "lambda,privacy_accuracy,privacy_std,utility_accuracy,utility_std,mi_bound\n";
    for (const auto* p : budget) {
      auto cell = [&](double v) {
        if (std::isnan(v)) return std::string();
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
      };
      out << cell(p->lambda) << "," << cell(p->privacy_acc) << "," << cell(p->privacy_std)
          << "," << cell(p->utility_acc) << "," << cell(p->utility_std) << ","
          << cell(p->mi_bound) << "\n";
    }
  }
  if (!other.empty()) {
    std::ofstream out(stem + "_baselines.csv");
    if (!out) throw DataError("cannot write baselines csv");
    out << "method,privacy_accuracy,privacy_std,utility_accuracy,utility_std\n";
    for (const auto* p : other) {
      auto cell = [&](double v) {
        if (std::isnan(v)) return std::string();
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
      };
      out << p->method << "," << cell(p->privacy_acc) << "," << cell(p->privacy_std) << ","
          << cell(p->utility_acc) << "," << cell(p->utility_std) << "\n";
    }
  }
}

}  // namespace tiprdc
