#include <doctest.h>

#include <cmath>

#include "test_support.hpp"
#include "tiprdc/rng.hpp"
#include "tiprdc/tensor.hpp"

using namespace tiprdc;

namespace {

Matrix random_matrix(Index r, Index c, RngStream& rng) {
  Matrix m(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) m(i, j) = rng.normal();
  return m;
}

}  // namespace

TEST_CASE("constants carry no graph, parameters do") {
  Tensor c = Tensor::constant(Matrix::Ones(2, 2));
  Tensor p = Tensor::parameter(Matrix::Ones(2, 2));
  CHECK_FALSE(c.requires_grad());
  CHECK(p.requires_grad());
  Tensor s = sum(mul(c, c));
  CHECK_FALSE(s.requires_grad());                 // all-constant expression stays flat
  CHECK(sum(mul(p, c)).requires_grad());
  CHECK_THROWS_AS(s.backward(), ContractError);   // nothing to differentiate
  CHECK_THROWS_AS(c.grad(), ContractError);
}

TEST_CASE("item and backward enforce scalar shape") {
  Tensor p = Tensor::parameter(Matrix::Ones(2, 3));
  CHECK_THROWS_AS(p.item(), ContractError);
  CHECK_THROWS_AS(p.backward(), ContractError);
  Tensor empty;
  CHECK_FALSE(empty.defined());
  CHECK_THROWS_AS(empty.value(), ContractError);
}

TEST_CASE("mean of squares has gradient 2x/n") {
  RngStream rng(11);
  Matrix x0 = random_matrix(3, 4, rng);
  Tensor x = Tensor::parameter(x0);
  Tensor loss = mean(mul(x, x));
  loss.backward();
  Matrix expected = 2.0 * x0 / 12.0;
  CHECK((x.grad() - expected).cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("gradients accumulate across shared subexpressions") {
  Tensor x = Tensor::parameter(Matrix::Constant(1, 1, 3.0));
  Tensor y = add(x, x);  // dy/dx = 2
  y.backward();
  CHECK(x.grad()(0, 0) == 2.0);
  x.zero_grad();
  CHECK_FALSE(x.has_grad());
  Tensor z = mul(x, x);  // dz/dx = 2x = 6
  z.backward();
  CHECK(x.grad()(0, 0) == 6.0);
}

TEST_CASE("detach blocks gradient flow") {
  Tensor x = Tensor::parameter(Matrix::Constant(1, 1, 2.0));
  Tensor y = mul(detach(x), x);  // treated as c*x with c = 2
  y.backward();
  CHECK(x.grad()(0, 0) == 2.0);
}

TEST_CASE("scalar broadcast sums the gradient on the scalar side") {
  Tensor s = Tensor::parameter(Matrix::Constant(1, 1, 1.5));
  Tensor m = Tensor::constant(Matrix::Ones(2, 3));
  Tensor out = sum(add(m, s));
  out.backward();
  CHECK(s.grad()(0, 0) == 6.0);  // one contribution per broadcast cell

  Tensor s2 = Tensor::parameter(Matrix::Constant(1, 1, 2.0));
  Matrix w(2, 2);
  w << 1, 2, 3, 4;
  Tensor out2 = sum(mul(Tensor::constant(w), s2));
  out2.backward();
  CHECK(s2.grad()(0, 0) == 10.0);
}

TEST_CASE("shape mismatches throw") {
  Tensor a = Tensor::constant(Matrix::Ones(2, 3));
  Tensor b = Tensor::constant(Matrix::Ones(3, 2));
  CHECK_THROWS_AS(add(a, b), ShapeError);
  CHECK_THROWS_AS(sub(a, b), ShapeError);
  CHECK_THROWS_AS(mul(a, b), ShapeError);
  CHECK_THROWS_AS(matmul(a, Tensor::constant(Matrix::Ones(2, 2))), ShapeError);
  CHECK_THROWS_AS(tile_rows(a, 3), ShapeError);
  CHECK_THROWS_AS(concat_rows(a, b), ShapeError);
  CHECK_THROWS_AS(concat_cols(Tensor::constant(Matrix::Ones(3, 1)), a), ShapeError);
  CHECK_THROWS_AS(slice_rows(a, 1, 5), ShapeError);
  CHECK_THROWS_AS(slice_cols(a, -1, 1), ShapeError);
}

TEST_CASE("matmul gradient is the transpose rule") {
  RngStream rng(17);
  Matrix a0 = random_matrix(2, 3, rng);
  Matrix b0 = random_matrix(3, 4, rng);
  Tensor a = Tensor::parameter(a0);
  Tensor b = Tensor::parameter(b0);
  Tensor loss = sum(matmul(a, b));
  loss.backward();
  Matrix g = Matrix::Ones(2, 4);
  CHECK((a.grad() - g * b0.transpose()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((b.grad() - a0.transpose() * g).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("softplus is exact in both tails") {
  Matrix v(1, 3);
  v << 50.0, -50.0, 0.0;
  Tensor out = softplus(Tensor::constant(v));
  // log1p(exp(-50)) computed independently.
  CHECK(out.value()(0, 0) - 50.0 == doctest::Approx(1.9287498479639178e-22));
  CHECK(out.value()(0, 1) == doctest::Approx(1.9287498479639178e-22));
  CHECK(out.value()(0, 2) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("sigmoid saturates without overflow") {
  Matrix v(1, 2);
  v << 800.0, -800.0;
  Tensor out = sigmoid(Tensor::constant(v));
  CHECK(out.value()(0, 0) == 1.0);
  CHECK(out.value()(0, 1) >= 0.0);
  CHECK(out.value()(0, 1) < 1e-300);
  CHECK(std::isfinite(out.value()(0, 1)));
}

TEST_CASE("log_softmax rows exponentiate to distributions, frozen example") {
  Matrix v(1, 3);
  v << 1.0, 2.0, 0.5;
  Tensor out = log_softmax(Tensor::constant(v));
  // Values from an independent shift-and-logsumexp computation.
  CHECK(out.value()(0, 0) == doctest::Approx(-1.4643687841079451).epsilon(1e-14));
  CHECK(out.value()(0, 1) == doctest::Approx(-0.46436878410794513).epsilon(1e-14));
  CHECK(out.value()(0, 2) == doctest::Approx(-1.9643687841079451).epsilon(1e-14));
  CHECK(out.value().array().exp().sum() == doctest::Approx(1.0).epsilon(1e-14));

  Matrix big(1, 2);
  big << 1000.0, 999.0;  // must not overflow
  Tensor out2 = log_softmax(Tensor::constant(big));
  CHECK(std::isfinite(out2.value()(0, 0)));
  CHECK(out2.value().array().exp().sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("one_hot builds indicators and validates labels") {
  Tensor oh = one_hot({0, 2, 1}, 3);
  Matrix expected(3, 3);
  expected << 1, 0, 0, 0, 0, 1, 0, 1, 0;
  CHECK(tsup::bitwise_equal(oh.value(), expected));
  CHECK_FALSE(oh.requires_grad());
  CHECK_THROWS_AS(one_hot({0, 3}, 3), DataError);
  CHECK_THROWS_AS(one_hot({-1}, 2), DataError);
  CHECK_THROWS_AS(one_hot({0}, 1), DataError);
}

TEST_CASE("slice and concat round trip and route gradients to their blocks") {
  RngStream rng(23);
  Matrix x0 = random_matrix(4, 6, rng);
  Tensor x = Tensor::parameter(x0);

  Tensor left = slice_cols(x, 0, 2);
  Tensor right = slice_cols(x, 2, 4);
  Tensor back = concat_cols(left, right);
  CHECK(tsup::bitwise_equal(back.value(), x0));

  Tensor loss = sum(slice_rows(slice_cols(x, 1, 2), 0, 1));  // cells (0,1), (0,2)
  loss.backward();
  Matrix g = x.grad();
  CHECK(g.sum() == 2.0);
  CHECK(g(0, 1) == 1.0);
  CHECK(g(0, 2) == 1.0);
}

TEST_CASE("sum_rows and tile_rows are adjoint") {
  RngStream rng(29);
  Matrix x0 = random_matrix(1, 5, rng);
  Tensor x = Tensor::parameter(x0);
  Tensor tiled = tile_rows(x, 3);
  CHECK(tiled.rows() == 3);
  Tensor loss = sum(tiled);
  loss.backward();
  CHECK((x.grad() - Matrix::Constant(1, 5, 3.0)).cwiseAbs().maxCoeff() == 0.0);

  Tensor y = Tensor::parameter(x0.replicate(3, 1));
  Tensor rs = sum_rows(y);
  CHECK(rs.cols() == 1);
  sum(rs).backward();
  CHECK((y.grad() - Matrix::Ones(3, 5)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("grad_check validates smooth pipelines to high precision") {
  RngStream rng(101);
  Matrix point = random_matrix(3, 3, rng);
  auto f = [](const Tensor& t) {
    return mean(mul(sigmoid(t), softplus(t)));
  };
  auto report = grad_check(f, point);
  CHECK(report.pass);
  CHECK(report.flagged == 0);
  CHECK(report.max_rel_error < 1e-6);
  CHECK(report.checked == 9);
}

TEST_CASE("grad_check flags relu kinks instead of failing") {
  Matrix point(1, 3);
  point << -1.0, 0.0, 1.0;  // exact kink at the middle coordinate
  auto f = [](const Tensor& t) { return sum(relu(t)); };
  auto report = grad_check(f, point);
  CHECK(report.pass);
  CHECK(report.flagged == 1);
  CHECK(report.entries[1].non_smooth);
}

TEST_CASE("every primitive passes finite differences at random points") {
  RngStream rng(303);
  int checked_points = 0;
  for (int trial = 0; trial < 10; ++trial) {
    Matrix p = random_matrix(2, 3, rng);
    Matrix w = random_matrix(3, 2, rng);
    Matrix q = random_matrix(2, 3, rng);

    auto check = [&](auto&& f) {
      auto report = grad_check(f, p, 1e-5, 1e-4);
      CHECK(report.pass);
      ++checked_points;
    };
    check([&](const Tensor& t) { return sum(add(t, Tensor::constant(q))); });
    check([&](const Tensor& t) { return sum(sub(Tensor::constant(q), t)); });
    check([&](const Tensor& t) { return mean(mul(t, Tensor::constant(q))); });
    check([&](const Tensor& t) { return sum(matmul(t, Tensor::constant(w))); });
    check([&](const Tensor& t) { return sum(sigmoid(t)); });
    check([&](const Tensor& t) { return sum(softplus(t)); });
    check([&](const Tensor& t) { return mean(exp(scale(t, 0.3))); });
    check([&](const Tensor& t) { return sum(log(softplus(t))); });
    check([&](const Tensor& t) { return sum(mul(log_softmax(t), Tensor::constant(q))); });
    check([&](const Tensor& t) { return sum(sum_rows(mul(t, t))); });
  }
  CHECK(checked_points == 100);
}
