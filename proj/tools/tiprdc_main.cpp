// Command line front end: train, sweep, baseline, evaluate, audit,
// generate-data. Exit codes: 0 success, 1 runtime failure, 2 bad
// configuration or usage (including dataset fingerprint mismatches).

#include <CLI11.hpp>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <thread>
#include <vector>

#include "tiprdc/baselines.hpp"
#include "tiprdc/datasets.hpp"
#include "tiprdc/evaluation.hpp"
#include "tiprdc/io.hpp"
#include "tiprdc/training.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

struct DataOptions {
  std::string preset;
  std::uint64_t data_seed = 7;
  std::string csv_path;
  std::string u_col = "u";
  int u_classes = 2;
  std::string y_col = "y";
  int y_classes = 2;
  bool no_y = false;
  double train_fraction = 2.0 / 3.0;
  bool no_standardize = false;
};

void add_data_options(CLI::App* cmd, DataOptions& o) {
  cmd->add_option("--preset", o.preset,
                  "synthetic dataset: family-a, family-b or gaussian");
  cmd->add_option("--data-seed", o.data_seed, "dataset generation seed")
      ->capture_default_str();
  cmd->add_option("--csv", o.csv_path, "load records from a csv file");
  cmd->add_option("--u-col", o.u_col, "private attribute column")->capture_default_str();
  cmd->add_option("--u-classes", o.u_classes, "private attribute classes")
      ->capture_default_str();
  cmd->add_option("--y-col", o.y_col, "utility label column")->capture_default_str();
  cmd->add_option("--y-classes", o.y_classes, "utility label classes")
      ->capture_default_str();
  cmd->add_flag("--no-y", o.no_y, "csv has no utility label column");
  cmd->add_option("--train-fraction", o.train_fraction, "csv train split fraction")
      ->capture_default_str();
  cmd->add_flag("--no-standardize", o.no_standardize,
                "skip per-feature standardization of csv input");
}

tiprdc::LabeledDataset resolve_dataset(const DataOptions& o) {
  bool has_preset = !o.preset.empty();
  bool has_csv = !o.csv_path.empty();
  if (has_preset == has_csv)
    throw tiprdc::ConfigError("choose exactly one of --preset or --csv");
  if (has_preset) {
    if (o.preset == "gaussian") return tiprdc::make_gaussian(8, 2000, 1000, o.data_seed);
    return tiprdc::make_synthetic(tiprdc::synthetic_preset(o.preset), o.data_seed,
                                  o.preset);
  }
  tiprdc::CsvSchema schema;
  schema.u_column = o.u_col;
  schema.u_classes = o.u_classes;
  if (!o.no_y) {
    schema.y_column = o.y_col;
    schema.y_classes = o.y_classes;
  }
  schema.train_fraction = o.train_fraction;
  schema.standardize = !o.no_standardize;
  return tiprdc::load_csv(o.csv_path, schema);
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw tiprdc::ConfigError("cannot open config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw tiprdc::ConfigError("config file '" + path + "': " + e.what());
  }
}

void write_json_file(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw tiprdc::DataError("cannot write '" + path.string() + "'");
  out << j.dump(2) << "\n";
}

std::string slugify(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-')
      out += c;
    else if (!out.empty() && out.back() != '-')
      out += '-';
  }
  while (!out.empty() && out.back() == '-') out.pop_back();
  return out;
}

std::vector<tiprdc::Index> parse_arch(const std::string& s) {
  std::vector<tiprdc::Index> widths;
  std::string token;
  for (char c : s + "-") {
    if (c == '-') {
      if (token.empty())
        throw tiprdc::ConfigError("bad architecture '" + s + "': empty width");
      widths.push_back(static_cast<tiprdc::Index>(std::stoll(token)));
      token.clear();
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      token += c;
    } else {
      throw tiprdc::ConfigError("bad architecture '" + s + "': widths are digits joined by '-'");
    }
  }
  return widths;
}

double final_mi_bound(const std::vector<tiprdc::PhaseRecord>& trace) {
  for (auto it = trace.rbegin(); it != trace.rend(); ++it)
    if (it->phase == 3) return it->mi_bound;
  return kNan;
}

// ---- train ----------------------------------------------------------------

struct TrainCmd {
  DataOptions data;
  std::string config_path;
  std::string out_dir;
  double lambda = 0.9;
  std::uint64_t seed = 42;
  tiprdc::Index epochs = 10;
  tiprdc::Index pretrain = 2;
  tiprdc::Index batch = 64;
  tiprdc::Index z_dim = 8;
  CLI::Option* lambda_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* epochs_opt = nullptr;
  CLI::Option* pretrain_opt = nullptr;
  CLI::Option* batch_opt = nullptr;
  CLI::Option* zdim_opt = nullptr;
};

void run_train(const TrainCmd& cmd) {
  tiprdc::TrainConfig cfg;
  if (!cmd.config_path.empty())
    cfg = tiprdc::train_config_from_json(load_json_file(cmd.config_path));
  if (cmd.lambda_opt->count()) cfg.lambda = cmd.lambda;
  if (cmd.seed_opt->count()) cfg.seed = cmd.seed;
  if (cmd.epochs_opt->count()) cfg.epochs = cmd.epochs;
  if (cmd.pretrain_opt->count()) cfg.pretrain_epochs = cmd.pretrain;
  if (cmd.batch_opt->count()) cfg.batch_size = cmd.batch;
  if (cmd.zdim_opt->count()) cfg.z_dim = cmd.z_dim;
  tiprdc::validate_config(cfg);

  tiprdc::LabeledDataset data = resolve_dataset(cmd.data);
  fs::create_directories(cmd.out_dir);
  tiprdc::TrainedModels models = tiprdc::train_models(data, cfg);

  fs::path out(cmd.out_dir);
  tiprdc::save_checkpoint((out / "checkpoint.tprc").string(), models);
  tiprdc::write_trace((out / "trace.ndjson").string(), models.trace);
  tiprdc::Matrix train_Z = tiprdc::map_features(models.extractor, data.train_X());
  tiprdc::Matrix eval_Z = tiprdc::map_features(models.extractor, data.eval_X());
  tiprdc::FeatureFile features = tiprdc::make_feature_file(
      data, "tiprdc lambda=" + tiprdc::str_g(cfg.lambda), train_Z, eval_Z, cfg.lambda,
      final_mi_bound(models.trace));
  tiprdc::save_features((out / "features.tfxf").string(), features);

  json resolved;
  resolved["train"] = tiprdc::to_json(cfg);
  resolved["dataset"] = data.provenance;
  resolved["data_fingerprint"] = tiprdc::hex64(tiprdc::fingerprint(data));
  write_json_file(out / "resolved_config.json", resolved);

  std::cout << "trained lambda=" << tiprdc::str_g(cfg.lambda) << " seed=" << cfg.seed
            << " steps=" << models.trace.size() / 3 << "\n";
  if (!models.trace.empty())
    std::cout << "final mi bound " << tiprdc::str_g(final_mi_bound(models.trace)) << "\n";
  std::cout << "wrote checkpoint.tprc, features.tfxf, trace.ndjson in " << cmd.out_dir
            << "\n";
}

// ---- sweep ----------------------------------------------------------------

struct SweepCmd {
  DataOptions data;
  std::string config_path;
  std::string out_dir;
  std::vector<double> lambdas;
  std::uint64_t seed = 42;
  int parallel = 1;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* lambdas_opt = nullptr;
};

void run_sweep(const SweepCmd& cmd) {
  tiprdc::SweepConfig cfg;
  std::vector<tiprdc::BaselineConfig> baselines;
  bool include_raw = true;
  if (!cmd.config_path.empty()) {
    json j = load_json_file(cmd.config_path);
    if (!j.is_object()) throw tiprdc::ConfigError("sweep config: expected a JSON object");
    for (const auto& [key, value] : j.items()) {
      if (key == "lambdas")
        cfg.lambdas = value.get<std::vector<double>>();
      else if (key == "train")
        cfg.train = tiprdc::train_config_from_json(value);
      else if (key == "protocol")
        cfg.protocol = tiprdc::protocol_from_json(value);
      else if (key == "baselines")
        for (const auto& b : value) baselines.push_back(tiprdc::baseline_config_from_json(b));
      else if (key == "include_raw")
        include_raw = value.get<bool>();
      else
        throw tiprdc::ConfigError("sweep config: unknown key '" + key + "'");
    }
  }
  if (cmd.lambdas_opt->count()) cfg.lambdas = cmd.lambdas;
  if (cmd.seed_opt->count()) cfg.train.seed = cmd.seed;
  cfg.parallel = cmd.parallel;
  if (cfg.parallel < 1) throw tiprdc::ConfigError("--parallel must be >= 1");
  if (cfg.lambdas.empty()) throw tiprdc::ConfigError("sweep: empty lambda grid");
  for (double l : cfg.lambdas)
    if (!(l >= 0.0 && l <= 1.0))
      throw tiprdc::ConfigError("sweep: lambda " + tiprdc::str_g(l) + " outside [0, 1]");

  tiprdc::LabeledDataset data = resolve_dataset(cmd.data);
  std::uint64_t fp = tiprdc::fingerprint(data);

  fs::path out(cmd.out_dir);
  fs::path points_dir = out / "points";
  fs::create_directories(points_dir);
  fs::path marker = out / ".incomplete";
  bool resuming = fs::exists(marker);
  {
    std::ofstream m(marker);
    m << "sweep in progress\n";
  }
  if (resuming) std::cout << "resuming: existing points will be reused\n";

  std::vector<double> grid = cfg.lambdas;
  std::sort(grid.begin(), grid.end(), std::greater<>());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  auto load_point = [&](const fs::path& p) {
    tiprdc::TradeoffPoint point =
        tiprdc::tradeoff_point_from_json(load_json_file(p.string()));
    if (point.data_fingerprint != fp)
      throw tiprdc::ConfigError("point file '" + p.filename().string() +
                                "' was computed on a different dataset; delete the "
                                "points directory to recompute");
    return point;
  };

  // Budget points, resumable and optionally parallel. Completed points are
  // loaded back instead of recomputed; merge order is the grid order either way.
  std::vector<tiprdc::TradeoffPoint> budget_points(grid.size());
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    fs::path p = points_dir / ("lambda_" + tiprdc::str_g(grid[i]) + ".json");
    if (fs::exists(p))
      budget_points[i] = load_point(p);
    else
      todo.push_back(i);
  }
  auto compute_budget = [&](std::size_t i) {
    tiprdc::TradeoffPoint point =
        tiprdc::evaluate_lambda_point(data, cfg.train, grid[i], cfg.protocol);
    write_json_file(points_dir / ("lambda_" + tiprdc::str_g(grid[i]) + ".json"),
                    tiprdc::to_json(point));
    budget_points[i] = point;
  };
  auto workers = std::min<std::size_t>(static_cast<std::size_t>(cfg.parallel), todo.size());
  if (workers <= 1) {
    for (std::size_t i : todo) compute_budget(i);
  } else {
    std::atomic<std::size_t> cursor{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto run = [&] {
      for (;;) {
        std::size_t k = cursor.fetch_add(1);
        if (k >= todo.size()) return;
        try {
          compute_budget(todo[k]);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(run);
    for (auto& t : threads) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  std::vector<tiprdc::TradeoffPoint> points(budget_points.begin(), budget_points.end());
  for (const auto& b : baselines) {
    tiprdc::BaselineConfig bc = b;
    fs::path p = points_dir /
                 ("baseline_" + slugify(tiprdc::baseline_kind_name(bc.kind) + "_" +
                                        tiprdc::str_g(bc.kind == tiprdc::BaselineKind::noisy
                                                          ? bc.sigma
                                                          : bc.epsilon)) +
                  ".json");
    if (fs::exists(p)) {
      points.push_back(load_point(p));
    } else {
      tiprdc::TradeoffPoint point = tiprdc::evaluate_baseline_point(data, bc, cfg.protocol);
      write_json_file(p, tiprdc::to_json(point));
      points.push_back(point);
    }
  }
  if (include_raw) {
    fs::path p = points_dir / "raw.json";
    if (fs::exists(p)) {
      points.push_back(load_point(p));
    } else {
      tiprdc::TradeoffPoint point = tiprdc::evaluate_raw_point(data, cfg.protocol);
      write_json_file(p, tiprdc::to_json(point));
      points.push_back(point);
    }
  }

  tiprdc::require_same_fingerprint(points);
  tiprdc::mark_pareto(points);
  tiprdc::Report report;
  report.dataset = data.provenance;
  report.data_fingerprint = fp;
  report.points = points;
  tiprdc::write_report((out / "report").string(), report);

  json resolved;
  resolved["lambdas"] = grid;
  resolved["train"] = tiprdc::to_json(cfg.train);
  resolved["protocol"] = tiprdc::to_json(cfg.protocol);
  json jb = json::array();
  for (const auto& b : baselines) jb.push_back(tiprdc::to_json(b));
  resolved["baselines"] = jb;
  resolved["include_raw"] = include_raw;
  resolved["dataset"] = data.provenance;
  resolved["data_fingerprint"] = tiprdc::hex64(fp);
  write_json_file(out / "resolved_config.json", resolved);

  fs::remove(marker);
  std::cout << "swept " << grid.size() << " budgets, " << points.size()
            << " points total; report written in " << cmd.out_dir << "\n";
}

// ---- baseline ----------------------------------------------------------------

struct BaselineCmd {
  DataOptions data;
  std::string config_path;
  std::string out_dir;
  std::string kind;
  double sigma = 40.0;
  double epsilon = 0.1;
  tiprdc::Index z_dim = 8;
  tiprdc::Index retained = 4;
  std::uint64_t seed = 42;
  CLI::Option* kind_opt = nullptr;
  CLI::Option* sigma_opt = nullptr;
  CLI::Option* epsilon_opt = nullptr;
  CLI::Option* zdim_opt = nullptr;
  CLI::Option* retained_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
};

void run_baseline(const BaselineCmd& cmd) {
  tiprdc::BaselineConfig cfg;
  if (!cmd.config_path.empty())
    cfg = tiprdc::baseline_config_from_json(load_json_file(cmd.config_path));
  else if (!cmd.kind_opt->count())
    throw tiprdc::ConfigError("baseline: --kind (or --config) is required");
  if (cmd.kind_opt->count()) cfg.kind = tiprdc::baseline_kind_from_name(cmd.kind);
  if (cmd.sigma_opt->count()) cfg.sigma = cmd.sigma;
  if (cmd.epsilon_opt->count()) cfg.epsilon = cmd.epsilon;
  if (cmd.zdim_opt->count()) cfg.z_dim = cmd.z_dim;
  if (cmd.retained_opt->count()) cfg.retained_dim = cmd.retained;
  if (cmd.seed_opt->count()) cfg.seed = cmd.seed;

  tiprdc::LabeledDataset data = resolve_dataset(cmd.data);
  tiprdc::validate_config(cfg, data.dim());
  fs::create_directories(cmd.out_dir);
  tiprdc::BaselineFeatures feats = tiprdc::run_baseline(data, cfg);

  fs::path out(cmd.out_dir);
  tiprdc::FeatureFile features =
      tiprdc::make_feature_file(data, feats.method, feats.train_Z, feats.eval_Z, kNan, kNan);
  tiprdc::save_features((out / "features.tfxf").string(), features);

  json resolved;
  resolved["baseline"] = tiprdc::to_json(cfg);
  resolved["dataset"] = data.provenance;
  resolved["data_fingerprint"] = tiprdc::hex64(tiprdc::fingerprint(data));
  write_json_file(out / "resolved_config.json", resolved);

  for (const auto& w : feats.warnings) std::cout << "warning: " << w << "\n";
  std::cout << "baseline '" << feats.method << "' wrote features.tfxf in " << cmd.out_dir
            << "\n";
}

// ---- evaluate and audit ---------------------------------------------------

struct EvaluateCmd {
  std::vector<std::string> feature_paths;
  std::string protocol_path;
  std::string out_stem;
  bool audit = false;
};

tiprdc::EvalProtocol load_protocol(const std::string& path) {
  if (path.empty()) return tiprdc::EvalProtocol{};
  return tiprdc::protocol_from_json(load_json_file(path));
}

void run_evaluate(const EvaluateCmd& cmd) {
  tiprdc::EvalProtocol proto = load_protocol(cmd.protocol_path);
  std::vector<tiprdc::FeatureFile> files;
  for (const auto& p : cmd.feature_paths) files.push_back(tiprdc::load_features(p));
  for (const auto& f : files)
    if (f.data_fingerprint != files.front().data_fingerprint)
      throw tiprdc::ConfigError(
          "feature files come from different datasets (fingerprints " +
          tiprdc::hex64(files.front().data_fingerprint) + " vs " +
          tiprdc::hex64(f.data_fingerprint) + "); refusing to compare");

  tiprdc::Report report;
  report.data_fingerprint = files.front().data_fingerprint;
  for (const auto& f : files) {
    tiprdc::LabeledDataset ds = tiprdc::dataset_from_features(f);
    if (report.dataset.empty()) report.dataset = ds.provenance;
    tiprdc::TradeoffPoint point = tiprdc::evaluate_point(
        f.method, f.lambda, f.mi_bound, f.train_Z, f.eval_Z, ds, proto);
    point.data_fingerprint = f.data_fingerprint;
    report.points.push_back(std::move(point));
  }
  tiprdc::mark_pareto(report.points);
  if (cmd.audit) {
    const tiprdc::FeatureFile& f = files.front();
    tiprdc::LabeledDataset ds = tiprdc::dataset_from_features(f);
    report.audit =
        tiprdc::adversary_audit(f.train_Z, f.eval_Z, ds, proto, tiprdc::default_audit_archs())
            .rows;
  }
  fs::path stem(cmd.out_stem);
  if (stem.has_parent_path()) fs::create_directories(stem.parent_path());
  tiprdc::write_report(cmd.out_stem, report);
  std::cout << "evaluated " << files.size() << " representation(s); report at "
            << cmd.out_stem << ".{json,txt}\n";
}

struct AuditCmd {
  std::string feature_path;
  std::string protocol_path;
  std::vector<std::string> archs;
  std::string out_stem;
};

void run_audit(const AuditCmd& cmd) {
  tiprdc::EvalProtocol proto = load_protocol(cmd.protocol_path);
  tiprdc::FeatureFile f = tiprdc::load_features(cmd.feature_path);
  tiprdc::LabeledDataset ds = tiprdc::dataset_from_features(f);
  std::vector<std::vector<tiprdc::Index>> archs;
  for (const auto& a : cmd.archs) archs.push_back(parse_arch(a));
  if (archs.empty()) archs = tiprdc::default_audit_archs();

  tiprdc::AuditResult audit = tiprdc::adversary_audit(f.train_Z, f.eval_Z, ds, proto, archs);
  tiprdc::Report report;
  report.dataset = ds.provenance;
  report.data_fingerprint = f.data_fingerprint;
  report.points.push_back(
      tiprdc::evaluate_point(f.method, f.lambda, f.mi_bound, f.train_Z, f.eval_Z, ds, proto));
  report.audit = audit.rows;
  fs::path stem(cmd.out_stem);
  if (stem.has_parent_path()) fs::create_directories(stem.parent_path());
  tiprdc::write_report(cmd.out_stem, report);
  std::cout << "worst-case adversary accuracy " << tiprdc::str_g(audit.worst_case)
            << " over " << archs.size() << " architectures; report at " << cmd.out_stem
            << ".{json,txt}\n";
}

// ---- generate-data ----------------------------------------------------------

struct GenerateCmd {
  std::string preset;
  std::uint64_t seed = 7;
  std::string out_path;
};

void run_generate(const GenerateCmd& cmd) {
  DataOptions o;
  o.preset = cmd.preset;
  o.data_seed = cmd.seed;
  tiprdc::LabeledDataset data = resolve_dataset(o);
  fs::path out(cmd.out_path);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  tiprdc::save_csv(cmd.out_path, data);
  json meta;
  meta["provenance"] = data.provenance;
  meta["rows"] = data.rows();
  meta["dim"] = data.dim();
  meta["u_classes"] = data.u_classes;
  meta["y_classes"] = data.y_classes;
  meta["train_rows"] = data.train_rows;
  meta["data_fingerprint"] = tiprdc::hex64(tiprdc::fingerprint(data));
  fs::path meta_path = out.parent_path() / (out.stem().string() + ".meta.json");
  write_json_file(meta_path, meta);
  std::cout << "wrote " << data.rows() << " rows to " << cmd.out_path << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"utility-privacy representation learning"};
  app.require_subcommand(1);

  TrainCmd train_cmd;
  auto* train = app.add_subcommand("train", "train the hybrid game at one budget");
  add_data_options(train, train_cmd.data);
  train->add_option("--config", train_cmd.config_path, "train config json");
  train_cmd.lambda_opt = train->add_option("--lambda", train_cmd.lambda,
                                           "utility-privacy budget in [0, 1]");
  train_cmd.seed_opt = train->add_option("--seed", train_cmd.seed, "training seed");
  train_cmd.epochs_opt = train->add_option("--epochs", train_cmd.epochs, "hybrid epochs");
  train_cmd.pretrain_opt =
      train->add_option("--pretrain-epochs", train_cmd.pretrain, "pretraining epochs");
  train_cmd.batch_opt = train->add_option("--batch", train_cmd.batch, "batch size");
  train_cmd.zdim_opt = train->add_option("--z-dim", train_cmd.z_dim, "representation width");
  train->add_option("--out", train_cmd.out_dir, "output directory")->required();
  train->callback([&] { run_train(train_cmd); });

  SweepCmd sweep_cmd;
  auto* sweep = app.add_subcommand("sweep", "evaluate a grid of budgets");
  add_data_options(sweep, sweep_cmd.data);
  sweep->add_option("--config", sweep_cmd.config_path, "sweep config json");
  sweep_cmd.lambdas_opt =
      sweep->add_option("--lambdas", sweep_cmd.lambdas, "budget grid, e.g. 1 0.9 0.5 0");
  sweep_cmd.seed_opt = sweep->add_option("--seed", sweep_cmd.seed, "training seed");
  sweep->add_option("--parallel", sweep_cmd.parallel, "worker threads for budgets")
      ->capture_default_str();
  sweep->add_option("--out", sweep_cmd.out_dir, "output directory")->required();
  sweep->callback([&] { run_sweep(sweep_cmd); });

  BaselineCmd baseline_cmd;
  auto* baseline = app.add_subcommand("baseline", "release features with a baseline");
  add_data_options(baseline, baseline_cmd.data);
  baseline->add_option("--config", baseline_cmd.config_path, "baseline config json");
  baseline_cmd.kind_opt = baseline->add_option(
      "--kind", baseline_cmd.kind, "noisy, dp, encoder or hybrid");
  baseline_cmd.sigma_opt =
      baseline->add_option("--sigma", baseline_cmd.sigma, "gaussian noise stddev");
  baseline_cmd.epsilon_opt =
      baseline->add_option("--epsilon", baseline_cmd.epsilon, "privacy budget");
  baseline_cmd.zdim_opt =
      baseline->add_option("--z-dim", baseline_cmd.z_dim, "encoder bottleneck width");
  baseline_cmd.retained_opt = baseline->add_option(
      "--retained", baseline_cmd.retained, "principal components kept (hybrid)");
  baseline_cmd.seed_opt = baseline->add_option("--seed", baseline_cmd.seed, "noise seed");
  baseline->add_option("--out", baseline_cmd.out_dir, "output directory")->required();
  baseline->callback([&] { run_baseline(baseline_cmd); });

  EvaluateCmd evaluate_cmd;
  auto* evaluate =
      app.add_subcommand("evaluate", "probe stored feature files and compare them");
  evaluate->add_option("--features", evaluate_cmd.feature_paths, "feature files (.tfxf)")
      ->required()
      ->expected(-1);
  evaluate->add_option("--protocol", evaluate_cmd.protocol_path, "protocol config json");
  evaluate->add_flag("--audit", evaluate_cmd.audit,
                     "also audit the first feature file with the default adversaries");
  evaluate->add_option("--out", evaluate_cmd.out_stem, "report stem (writes stem.json/.txt)")
      ->required();
  evaluate->callback([&] { run_evaluate(evaluate_cmd); });

  AuditCmd audit_cmd;
  auto* audit = app.add_subcommand("audit", "attack one representation with several adversaries");
  audit->add_option("--features", audit_cmd.feature_path, "feature file (.tfxf)")->required();
  audit->add_option("--protocol", audit_cmd.protocol_path, "protocol config json");
  audit->add_option("--arch", audit_cmd.archs,
                    "adversary hidden widths joined by '-', repeatable (e.g. 32-16)");
  audit->add_option("--out", audit_cmd.out_stem, "report stem")->required();
  audit->callback([&] { run_audit(audit_cmd); });

  GenerateCmd generate_cmd;
  auto* generate = app.add_subcommand("generate-data", "write a synthetic dataset as csv");
  generate->add_option("--preset", generate_cmd.preset, "family-a, family-b or gaussian")
      ->required();
  generate->add_option("--seed", generate_cmd.seed, "generation seed")->capture_default_str();
  generate->add_option("--out", generate_cmd.out_path, "csv path")->required();
  generate->callback([&] { run_generate(generate_cmd); });

  try {
    app.parse(argc, argv);
    return 0;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const tiprdc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
