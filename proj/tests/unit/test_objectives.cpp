#include <doctest.h>

#include <cmath>

#include "test_support.hpp"
#include "tiprdc/objectives.hpp"

using namespace tiprdc;

TEST_CASE("cross entropy reproduces independently computed values") {
  // Two strongly separated logits: loss is log1p(exp(-20)), not the naive
  // -log(p) evaluated in single precision.
  Matrix logits(1, 2);
  logits << 10.0, -10.0;
  Tensor loss = cross_entropy_loss(Tensor::constant(logits), {0});
  CHECK(loss.item() == doctest::Approx(2.061153620314381e-09).epsilon(1e-12));

  // Three classes, label 1: logsumexp([1, 2, 0.5]) - 2.
  Matrix l3(1, 3);
  l3 << 1.0, 2.0, 0.5;
  Tensor loss3 = cross_entropy_loss(Tensor::constant(l3), {1});
  CHECK(loss3.item() == doctest::Approx(0.46436878410794513).epsilon(1e-14));

  // Batch mean: two identical rows give the single-row loss.
  Matrix batch(2, 3);
  batch << 1.0, 2.0, 0.5, 1.0, 2.0, 0.5;
  Tensor lb = cross_entropy_loss(Tensor::constant(batch), {1, 1});
  CHECK(lb.item() == doctest::Approx(loss3.item()).epsilon(1e-14));
}

TEST_CASE("cross entropy validates labels and shapes") {
  Matrix logits(2, 2);
  logits << 1.0, 0.0, 0.0, 1.0;
  Tensor t = Tensor::constant(logits);
  CHECK_THROWS_AS(cross_entropy_loss(t, {0}), ShapeError);       // row/label mismatch
  CHECK_THROWS_AS(cross_entropy_loss(t, {0, 2}), DataError);     // label out of range
  Matrix one_col(2, 1);
  one_col << 1.0, 2.0;
  CHECK_THROWS_AS(cross_entropy_loss(Tensor::constant(one_col), {0, 0}), ShapeError);
}

TEST_CASE("cross entropy gradient passes finite differences") {
  RngStream rng(55);
  for (int trial = 0; trial < 5; ++trial) {
    Matrix logits(4, 3);
    for (Index i = 0; i < 4; ++i)
      for (Index j = 0; j < 3; ++j) logits(i, j) = rng.normal();
    std::vector<int> labels = {0, 2, 1, 2};
    auto report = grad_check(
        [&](const Tensor& t) { return cross_entropy_loss(t, labels); }, logits);
    CHECK(report.pass);
    CHECK(report.flagged == 0);
  }
}

TEST_CASE("zero critic scores give exactly -2 ln 2") {
  Tensor zeros_j = Tensor::constant(Matrix::Zero(16, 1));
  Tensor zeros_m = Tensor::constant(Matrix::Zero(16, 1));
  Tensor bound = jsd_bound_from_scores(zeros_j, zeros_m);
  CHECK(std::abs(bound.item() - (-2.0 * std::log(2.0))) < 1e-15);
}

TEST_CASE("bound from scores matches a frozen hand computation") {
  Matrix tj(2, 1), tm(2, 1);
  tj << 1.0, -0.5;
  tm << 0.2, 0.3;
  Tensor bound = jsd_bound_from_scores(Tensor::constant(tj), Tensor::constant(tm));
  // mean(-softplus(-t_joint)) - mean(softplus(t_marginal)), by hand.
  CHECK(bound.item() == doctest::Approx(-1.4699163927742243).epsilon(1e-14));
}

TEST_CASE("bound from scores requires column vectors") {
  Tensor row = Tensor::constant(Matrix::Zero(1, 4));
  Tensor col = Tensor::constant(Matrix::Zero(4, 1));
  CHECK_THROWS_AS(jsd_bound_from_scores(row, col), ShapeError);
  CHECK_THROWS_AS(jsd_bound_from_scores(col, row), ShapeError);
}

TEST_CASE("bound is never positive for random scores") {
  RngStream rng(66);
  for (int trial = 0; trial < 200; ++trial) {
    Matrix tj(8, 1), tm(8, 1);
    for (Index i = 0; i < 8; ++i) {
      tj(i, 0) = rng.normal(0.0, 5.0);
      tm(i, 0) = rng.normal(0.0, 5.0);
    }
    Tensor bound = jsd_bound_from_scores(Tensor::constant(tj), Tensor::constant(tm));
    CHECK(bound.item() <= 0.0);
  }
}

TEST_CASE("negative batches pair each row with a different row") {
  RngStream data(7);
  Matrix x0(6, 3);
  for (Index i = 0; i < 6; ++i)
    for (Index j = 0; j < 3; ++j) x0(i, j) = data.normal();
  Tensor x = Tensor::constant(x0);
  Tensor u = one_hot({0, 1, 0, 1, 0, 1}, 2);

  RngStream rng(9);
  JsdBatchPair pair = make_negative_batch(x, u, rng);
  REQUIRE(pair.permutation.size() == 6);
  for (Index i = 0; i < 6; ++i) {
    Index p = pair.permutation[static_cast<std::size_t>(i)];
    CHECK(p != i);
    CHECK((pair.x_marginal.value().row(i) - x0.row(p)).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK_FALSE(pair.x_marginal.requires_grad());

  Tensor tiny = Tensor::constant(Matrix::Ones(1, 3));
  Tensor u1 = one_hot({0}, 2);
  CHECK_THROWS_AS(make_negative_batch(tiny, u1, rng), DataError);
}

TEST_CASE("full bound pipeline differentiates cleanly through z") {
  CriticSpec spec;
  spec.x_dim = 4;
  spec.z_dim = 3;
  spec.u_classes = 2;
  spec.hidden = {8, 6};
  spec.z_layer = 1;
  spec.u_layer = 2;
  RngStream rng(77);
  Critic critic(spec, rng);

  RngStream data(78);
  Matrix x0(5, 4), z0(5, 3);
  for (Index i = 0; i < 5; ++i) {
    for (Index j = 0; j < 4; ++j) x0(i, j) = data.normal();
    for (Index j = 0; j < 3; ++j) z0(i, j) = data.normal();
  }
  Tensor x = Tensor::constant(x0);
  Tensor u = one_hot({0, 1, 1, 0, 1}, 2);
  RngStream neg(79);
  JsdBatchPair pair = make_negative_batch(x, u, neg);

  auto report = grad_check(
      [&](const Tensor& z) { return jsd_mi_bound(critic, z, pair); }, z0);
  CHECK(report.max_rel_error <= 1e-4);
  CHECK(report.checked == 15);
}
