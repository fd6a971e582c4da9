#include <doctest.h>

#include <cmath>

#include "test_support.hpp"
#include "tiprdc/evaluation.hpp"

using namespace tiprdc;

namespace {

// Cheap protocol for unit-level checks; statistical assertions stay loose.
EvalProtocol tiny_protocol() {
  EvalProtocol proto;
  proto.probe_hidden = {8};
  proto.probe_epochs = 8;
  proto.probe_batch = 32;
  proto.probe_adam.lr = 0.01;
  proto.seeds = {1, 2};
  return proto;
}

LabeledDataset tiny_data() {
  SyntheticSpec spec;
  spec.train_rows = 256;
  spec.eval_rows = 128;
  return make_synthetic(spec, 21, "blocks");
}

}  // namespace

TEST_CASE("protocol validation") {
  EvalProtocol proto;
  validate_protocol(proto);
  EvalProtocol bad = proto;
  bad.probe_epochs = 0;
  CHECK_THROWS_AS(validate_protocol(bad), ConfigError);
  bad = proto;
  bad.probe_batch = 1;
  CHECK_THROWS_AS(validate_protocol(bad), ConfigError);
  bad = proto;
  bad.seeds.clear();
  CHECK_THROWS_AS(validate_protocol(bad), ConfigError);
}

TEST_CASE("sample statistics match hand values") {
  CHECK(stat_mean({1.0, 2.0, 3.0}) == 2.0);
  CHECK(stat_sample_std({1.0, 2.0, 3.0}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(stat_sample_std({5.0}) == 0.0);
  CHECK_THROWS_AS(stat_mean({}), ContractError);
}

TEST_CASE("probes learn a separable task and respect shapes") {
  LabeledDataset data = tiny_data();
  EvalProtocol proto = tiny_protocol();
  // Raw features: the private block makes u easy to recover.
  double acc = train_probe(data.train_X(), data.train_u(), data.u_classes,
                           data.eval_X(), data.eval_u(), {8}, proto, 77);
  CHECK(acc > 0.8);

  CHECK_THROWS_AS(train_probe(data.train_X(), data.eval_u(), 2, data.eval_X(),
                              data.eval_u(), {8}, proto, 1),
                  ShapeError);
  CHECK_THROWS_AS(train_probe(data.train_X(), data.train_u(), 2,
                              Matrix::Ones(10, 3), data.eval_u(), {8}, proto, 1),
                  ShapeError);
}

TEST_CASE("probe_features runs both probes, or one when y is absent") {
  LabeledDataset data = tiny_data();
  EvalProtocol proto = tiny_protocol();
  ProbeOutcome out =
      probe_features(data.train_X(), data.eval_X(), data, proto, 1);
  CHECK(out.privacy_acc > 0.6);
  CHECK(out.utility_acc > 0.6);

  LabeledDataset g = make_gaussian(4, 128, 64, 2);
  ProbeOutcome gout = probe_features(g.train_X(), g.eval_X(), g, proto, 1);
  CHECK(std::isnan(gout.utility_acc));
  CHECK(gout.privacy_acc > 0.3);  // chance-level, just well-defined

  CHECK_THROWS_AS(probe_features(data.train_X(), Matrix::Ones(3, 16), data, proto, 1),
                  ShapeError);
}

TEST_CASE("evaluate_point aggregates across protocol seeds") {
  LabeledDataset data = tiny_data();
  EvalProtocol proto = tiny_protocol();
  TradeoffPoint p = evaluate_point("raw", std::nan(""), std::nan(""), data.train_X(),
                                   data.eval_X(), data, proto);
  CHECK(p.method == "raw");
  CHECK(p.privacy_by_seed.size() == 2);
  CHECK(p.utility_by_seed.size() == 2);
  CHECK(p.privacy_acc ==
        doctest::Approx(tsup::sample_mean(p.privacy_by_seed)).epsilon(1e-15));
  CHECK(p.data_fingerprint == fingerprint(data));
  CHECK(std::isnan(p.lambda));

  TradeoffPoint again = evaluate_raw_point(data, proto);
  CHECK(again.privacy_acc == p.privacy_acc);  // same protocol, same probes
  CHECK(again.utility_acc == p.utility_acc);
}

TEST_CASE("pareto marking flags strictly beaten points only") {
  auto mk = [](const char* name, double priv, double util) {
    TradeoffPoint p;
    p.method = name;
    p.privacy_acc = priv;
    p.utility_acc = util;
    return p;
  };
  std::vector<TradeoffPoint> points = {
      mk("a", 0.5, 0.9),   // dominates b
      mk("b", 0.6, 0.8),   // beaten on both axes by a
      mk("c", 0.4, 0.7),   // better privacy than a, worse utility: kept
      mk("d", 0.5, 0.9),   // ties a exactly: kept (not strictly beaten)
      mk("e", std::nan(""), std::nan("")),  // no utility: never marked
  };
  points[4].privacy_acc = 0.99;
  mark_pareto(points);
  CHECK_FALSE(points[0].pareto_dominated);
  CHECK(points[1].pareto_dominated);
  CHECK_FALSE(points[2].pareto_dominated);
  CHECK_FALSE(points[3].pareto_dominated);
  CHECK_FALSE(points[4].pareto_dominated);
}

TEST_CASE("fingerprint mismatches across points are rejected loudly") {
  TradeoffPoint a;
  a.method = "raw";
  a.data_fingerprint = 1;
  TradeoffPoint b;
  b.method = "dp eps=0.1";
  b.data_fingerprint = 2;
  try {
    require_same_fingerprint({a, b});
    FAIL("expected ContractError");
  } catch (const ContractError& e) {
    std::string msg = e.what();
    CHECK(msg.find("raw") != std::string::npos);
    CHECK(msg.find("dp eps=0.1") != std::string::npos);
  }
  require_same_fingerprint({a, a});  // no throw
  require_same_fingerprint({});
}

TEST_CASE("audit covers every architecture and reports the worst case") {
  LabeledDataset data = tiny_data();
  EvalProtocol proto = tiny_protocol();
  auto audit = adversary_audit(data.train_X(), data.eval_X(), data, proto,
                               {{4}, {8, 4}});
  REQUIRE(audit.rows.size() == 2);
  CHECK((audit.rows[0].hidden == std::vector<Index>{4}));
  CHECK((audit.rows[1].hidden == std::vector<Index>{8, 4}));
  double expected_worst =
      std::max(audit.rows[0].privacy_acc, audit.rows[1].privacy_acc);
  CHECK(audit.worst_case == expected_worst);
  CHECK(audit.worst_case > 0.7);  // raw features leak the private block

  CHECK_THROWS_AS(adversary_audit(data.train_X(), data.eval_X(), data, proto, {}),
                  ConfigError);
}

TEST_CASE("lambda sweep is deterministic and parallel-invariant") {
  SyntheticSpec spec;
  spec.train_rows = 128;
  spec.eval_rows = 64;
  LabeledDataset data = make_synthetic(spec, 31, "blocks");

  SweepConfig cfg;
  cfg.lambdas = {0.0, 1.0, 0.5, 0.5};  // unsorted with a duplicate
  cfg.train.batch_size = 32;
  cfg.train.epochs = 1;
  cfg.train.pretrain_epochs = 1;
  cfg.train.z_dim = 4;
  cfg.train.extractor_hidden = {8};
  cfg.train.classifier_hidden = {8};
  cfg.train.critic_hidden = {8, 8};
  cfg.protocol = tiny_protocol();
  cfg.protocol.seeds = {1};

  SweepResult serial = sweep_lambda(data, cfg);
  REQUIRE(serial.points.size() == 3);
  CHECK(serial.points[0].lambda == 1.0);
  CHECK(serial.points[1].lambda == 0.5);
  CHECK(serial.points[2].lambda == 0.0);
  CHECK(serial.data_fingerprint == fingerprint(data));

  cfg.parallel = 3;
  SweepResult parallel = sweep_lambda(data, cfg);
  REQUIRE(parallel.points.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(parallel.points[i].privacy_acc == serial.points[i].privacy_acc);
    CHECK(parallel.points[i].utility_acc == serial.points[i].utility_acc);
    CHECK(parallel.points[i].mi_bound == serial.points[i].mi_bound);
  }

  SweepConfig bad = cfg;
  bad.lambdas = {1.2};
  CHECK_THROWS_AS(sweep_lambda(data, bad), ConfigError);
  bad = cfg;
  bad.lambdas.clear();
  CHECK_THROWS_AS(sweep_lambda(data, bad), ConfigError);
}
