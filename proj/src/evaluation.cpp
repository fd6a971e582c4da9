#include "tiprdc/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>
#include <utility>

namespace tiprdc {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

}  // namespace

void validate_protocol(const EvalProtocol& proto) {
  if (proto.probe_epochs < 1) throw ConfigError("protocol: probe_epochs must be >= 1");
  if (proto.probe_batch < 2) throw ConfigError("protocol: probe_batch must be >= 2");
  if (proto.seeds.empty()) throw ConfigError("protocol: need at least one seed");
}

double stat_mean(const std::vector<double>& v) {
  if (v.empty()) throw ContractError("stat_mean: empty sample");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double stat_sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = stat_mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

double train_probe(const Matrix& train_Z, const std::vector<int>& train_labels,
                   int classes, const Matrix& eval_Z,
                   const std::vector<int>& eval_labels,
                   const std::vector<Index>& hidden, const EvalProtocol& proto,
                   std::uint64_t seed) {
  validate_protocol(proto);
  if (static_cast<std::size_t>(train_Z.rows()) != train_labels.size())
    throw ShapeError("probe: " + std::to_string(train_Z.rows()) + " rows vs " +
                     std::to_string(train_labels.size()) + " labels");
  if (train_Z.cols() != eval_Z.cols())
    throw ShapeError("probe: train width " + std::to_string(train_Z.cols()) +
                     " vs eval width " + std::to_string(eval_Z.cols()));
  Index batch = proto.probe_batch;
  if (batch > train_Z.rows())
    throw DataError("probe: batch " + std::to_string(batch) + " exceeds " +
                    std::to_string(train_Z.rows()) + " training rows");

  RngPool pool(seed);
  RngStream init = pool.stream("probe-init");
  Mlp net(ModelSpec::dense(train_Z.cols(), hidden, classes), init);
  Adam opt(net.params(), proto.probe_adam);
  RngStream shuffle = pool.stream("probe-batches");
  Index n_batches = train_Z.rows() / batch;
  for (Index e = 0; e < proto.probe_epochs; ++e) {
    auto perm = shuffle.permutation(train_Z.rows());
    for (Index b = 0; b < n_batches; ++b) {
      Matrix xb(batch, train_Z.cols());
      std::vector<int> lb(static_cast<std::size_t>(batch));
      for (Index r = 0; r < batch; ++r) {
        Index src = perm[static_cast<std::size_t>(b * batch + r)];
        xb.row(r) = train_Z.row(src);
        lb[static_cast<std::size_t>(r)] = train_labels[static_cast<std::size_t>(src)];
      }
      zero_grads(net.params());
      Tensor ce = cross_entropy_loss(net.forward(Tensor::constant(std::move(xb))), lb);
      ce.backward();
      opt.step();
    }
  }
  return accuracy(map_features(net, eval_Z), eval_labels);
}

ProbeOutcome probe_features(const Matrix& train_Z, const Matrix& eval_Z,
                            const LabeledDataset& data, const EvalProtocol& proto,
                            std::uint64_t seed) {
  if (train_Z.rows() != data.train_rows || eval_Z.rows() != data.eval_rows())
    throw ShapeError("probe_features: split sizes " + std::to_string(train_Z.rows()) +
                     "/" + std::to_string(eval_Z.rows()) + " do not match dataset " +
                     std::to_string(data.train_rows) + "/" +
                     std::to_string(data.eval_rows()));
  Matrix tr = train_Z;
  Matrix ev = eval_Z;
  if (proto.standardize) {
    Standardizer s = Standardizer::fit(train_Z);
    tr = s.apply(train_Z);
    ev = s.apply(eval_Z);
  }
  RngPool pool(seed);
  ProbeOutcome out;
  out.privacy_acc = train_probe(tr, data.train_u(), data.u_classes, ev, data.eval_u(),
                                proto.probe_hidden, proto, pool.derive("privacy"));
  out.utility_acc =
      data.has_y()
          ? train_probe(tr, data.train_y(), data.y_classes, ev, data.eval_y(),
                        proto.probe_hidden, proto, pool.derive("utility"))
          : kNan;
  return out;
}

namespace {

TradeoffPoint aggregate(std::string method, double lambda, double mi_bound,
                        std::vector<double> privacy, std::vector<double> utility,
                        const LabeledDataset& data) {
  TradeoffPoint p;
  p.method = std::move(method);
  p.lambda = lambda;
  p.privacy_acc = stat_mean(privacy);
  p.privacy_std = stat_sample_std(privacy);
  bool has_util = !utility.empty() && !std::isnan(utility.front());
  p.utility_acc = has_util ? stat_mean(utility) : kNan;
  p.utility_std = has_util ? stat_sample_std(utility) : kNan;
  p.privacy_by_seed = std::move(privacy);
  p.utility_by_seed = std::move(utility);
  p.mi_bound = mi_bound;
  p.data_fingerprint = fingerprint(data);
  return p;
}

}  // namespace

TradeoffPoint evaluate_point(const std::string& method, double lambda, double mi_bound,
                             const Matrix& train_Z, const Matrix& eval_Z,
                             const LabeledDataset& data, const EvalProtocol& proto) {
  validate_protocol(proto);
  std::vector<double> privacy, utility;
  for (std::uint64_t seed : proto.seeds) {
    ProbeOutcome outcome = probe_features(train_Z, eval_Z, data, proto, seed);
    privacy.push_back(outcome.privacy_acc);
    utility.push_back(outcome.utility_acc);
  }
  return aggregate(method, lambda, mi_bound, std::move(privacy), std::move(utility),
                   data);
}

TradeoffPoint evaluate_lambda_point(const LabeledDataset& data, TrainConfig base,
                                    double lambda, const EvalProtocol& proto) {
  validate_protocol(proto);
  std::vector<double> privacy, utility, bounds;
  for (std::uint64_t seed : proto.seeds) {
    TrainConfig cfg = base;
    cfg.lambda = lambda;
    cfg.seed = seed;
    TrainedModels models = train_models(data, cfg);
    Matrix tr = map_features(models.extractor, data.train_X());
    Matrix ev = map_features(models.extractor, data.eval_X());
    ProbeOutcome outcome = probe_features(tr, ev, data, proto, seed);
    privacy.push_back(outcome.privacy_acc);
    utility.push_back(outcome.utility_acc);
    for (auto it = models.trace.rbegin(); it != models.trace.rend(); ++it)
      if (it->phase == 3) {
        bounds.push_back(it->mi_bound);
        break;
      }
  }
  double mi = bounds.empty() ? kNan : stat_mean(bounds);
  return aggregate("tiprdc lambda=" + str_g(lambda), lambda, mi, std::move(privacy),
                   std::move(utility), data);
}

TradeoffPoint evaluate_baseline_point(const LabeledDataset& data, BaselineConfig base,
                                      const EvalProtocol& proto) {
  validate_protocol(proto);
  std::vector<double> privacy, utility;
  std::string method;
  for (std::uint64_t seed : proto.seeds) {
    BaselineConfig cfg = base;
    cfg.seed = seed;
    BaselineFeatures feats = run_baseline(data, cfg);
    method = feats.method;
    ProbeOutcome outcome =
        probe_features(feats.train_Z, feats.eval_Z, data, proto, seed);
    privacy.push_back(outcome.privacy_acc);
    utility.push_back(outcome.utility_acc);
  }
  return aggregate(std::move(method), kNan, kNan, std::move(privacy),
                   std::move(utility), data);
}

TradeoffPoint evaluate_raw_point(const LabeledDataset& data, const EvalProtocol& proto) {
  return evaluate_point("raw", kNan, kNan, data.train_X(), data.eval_X(), data, proto);
}

SweepResult sweep_lambda(const LabeledDataset& data, const SweepConfig& config) {
  validate_protocol(config.protocol);
  if (config.lambdas.empty()) throw ConfigError("sweep: empty lambda grid");
  if (config.parallel < 1) throw ConfigError("sweep: parallel must be >= 1");
  for (double l : config.lambdas)
    if (!(l >= 0.0 && l <= 1.0))
      throw ConfigError("sweep: lambda " + str_g(l) + " outside [0, 1]");

  std::vector<double> grid = config.lambdas;
  std::sort(grid.begin(), grid.end(), std::greater<>());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  SweepResult result;
  result.points.resize(grid.size());
  result.data_fingerprint = fingerprint(data);

  auto worker_count =
      std::min<std::size_t>(static_cast<std::size_t>(config.parallel), grid.size());
  if (worker_count <= 1) {
    for (std::size_t i = 0; i < grid.size(); ++i)
      result.points[i] = evaluate_lambda_point(data, config.train, grid[i], config.protocol);
  } else {
    std::atomic<std::size_t> cursor{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto run = [&] {
      for (;;) {
        std::size_t i = cursor.fetch_add(1);
        if (i >= grid.size()) return;
        try {
          result.points[i] =
              evaluate_lambda_point(data, config.train, grid[i], config.protocol);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> threads;
    threads.reserve(worker_count);
    for (std::size_t w = 0; w < worker_count; ++w) threads.emplace_back(run);
    for (auto& t : threads) t.join();
    if (failure) std::rethrow_exception(failure);
  }
  mark_pareto(result.points);
  return result;
}

std::vector<std::vector<Index>> default_audit_archs() {
  return {{16}, {32, 16}, {32, 32, 16}};
}

AuditResult adversary_audit(const Matrix& train_Z, const Matrix& eval_Z,
                            const LabeledDataset& data, const EvalProtocol& proto,
                            const std::vector<std::vector<Index>>& archs) {
  validate_protocol(proto);
  if (archs.empty()) throw ConfigError("audit: need at least one architecture");
  Matrix tr = train_Z;
  Matrix ev = eval_Z;
  if (proto.standardize) {
    Standardizer s = Standardizer::fit(train_Z);
    tr = s.apply(train_Z);
    ev = s.apply(eval_Z);
  }
  AuditResult result;
  for (std::size_t a = 0; a < archs.size(); ++a) {
    std::vector<double> accs;
    for (std::uint64_t seed : proto.seeds) {
      RngPool pool(seed);
      accs.push_back(train_probe(tr, data.train_u(), data.u_classes, ev, data.eval_u(),
                                 archs[a], proto,
                                 pool.derive("audit", static_cast<std::uint64_t>(a))));
    }
    AuditRow row;
    row.hidden = archs[a];
    row.privacy_acc = stat_mean(accs);
    row.privacy_std = stat_sample_std(accs);
    result.rows.push_back(std::move(row));
  }
  result.worst_case = 0.0;
  for (const auto& row : result.rows)
    result.worst_case = std::max(result.worst_case, row.privacy_acc);
  return result;
}

void mark_pareto(std::vector<TradeoffPoint>& points) {
  for (auto& p : points) {
    p.pareto_dominated = false;
    if (std::isnan(p.utility_acc)) continue;
    for (const auto& q : points) {
      if (&q == &p || std::isnan(q.utility_acc)) continue;
      if (q.privacy_acc < p.privacy_acc && q.utility_acc > p.utility_acc) {
        p.pareto_dominated = true;
        break;
      }
    }
  }
}

void require_same_fingerprint(const std::vector<TradeoffPoint>& points) {
  if (points.empty()) return;
  for (const auto& p : points)
    if (p.data_fingerprint != points.front().data_fingerprint)
      throw ContractError("tradeoff points computed on different datasets: '" +
                          points.front().method + "' has fingerprint " +
                          hex64(points.front().data_fingerprint) + ", '" + p.method +
                          "' has " + hex64(p.data_fingerprint));
}

}  // namespace tiprdc
