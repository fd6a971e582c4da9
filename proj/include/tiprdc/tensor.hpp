#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "tiprdc/common.hpp"

namespace tiprdc {

// Define-by-run reverse-mode autodiff over dense matrices. A BasicTensor is a
// cheap handle onto a graph node; operations on tensors record a backprop
// closure only when at least one input requires gradients, so expressions
// over constants stay plain value computations.

template <typename Scalar>
struct TensorNode {
  using M = DenseMatrix<Scalar>;

  M value;
  M grad;                 // allocated on first contribution
  bool has_grad = false;
  bool requires_grad = false;
  std::uint64_t id = 0;
  std::vector<std::shared_ptr<TensorNode>> parents;
  std::function<void(const M&)> backprop;  // receives this node's grad

  static std::uint64_t next_id() {
    static std::atomic<std::uint64_t> counter{0};
    return counter.fetch_add(1, std::memory_order_relaxed);
  }
};

template <typename Scalar>
class BasicTensor {
 public:
  using M = DenseMatrix<Scalar>;
  using Node = TensorNode<Scalar>;
  using NodePtr = std::shared_ptr<Node>;

  BasicTensor() = default;
  explicit BasicTensor(NodePtr node) : node_(std::move(node)) {}

  static BasicTensor constant(M value) {
    auto n = std::make_shared<Node>();
    n->value = std::move(value);
    n->id = Node::next_id();
    return BasicTensor(std::move(n));
  }

  static BasicTensor parameter(M value) {
    auto n = std::make_shared<Node>();
    n->value = std::move(value);
    n->requires_grad = true;
    n->id = Node::next_id();
    return BasicTensor(std::move(n));
  }

  bool defined() const { return node_ != nullptr; }
  const M& value() const { return check()->value; }
  M& value() { return check()->value; }
  bool requires_grad() const { return check()->requires_grad; }
  bool has_grad() const { return check()->has_grad; }
  Index rows() const { return check()->value.rows(); }
  Index cols() const { return check()->value.cols(); }

  /// Scalar payload of a 1x1 tensor.
  Scalar item() const {
    const auto& v = check()->value;
    if (v.rows() != 1 || v.cols() != 1)
      throw ContractError("item: tensor is " + shape_str(v.rows(), v.cols()) + ", expected 1x1");
    return v(0, 0);
  }

  /// Accumulated gradient; zero-shaped matrix semantics are avoided by
  /// returning an explicit zero matrix when no contribution arrived.
  M grad() const {
    const auto& n = *check();
    if (!n.requires_grad)
      throw ContractError("grad: tensor does not require gradients");
    if (!n.has_grad) return M::Zero(n.value.rows(), n.value.cols());
    return n.grad;
  }

  void zero_grad() {
    auto& n = *check();
    n.has_grad = false;
    n.grad.resize(0, 0);
  }

  /// Seeds d(self)/d(self) = 1 and pushes gradients through every recorded
  /// operation in reverse topological order. Contributions add up, so run
  /// zero_grad on persistent parameters between steps.
  void backward() const {
    Node* root = check().get();
    if (root->value.rows() != 1 || root->value.cols() != 1)
      throw ContractError("backward: loss must be 1x1, got " +
                          shape_str(root->value.rows(), root->value.cols()));
    if (!root->requires_grad)
      throw ContractError("backward: tensor does not require gradients");

    std::vector<Node*> order;
    std::unordered_set<Node*> visited;
    std::vector<std::pair<Node*, std::size_t>> stack;
    visited.insert(root);
    stack.push_back({root, 0});
    while (!stack.empty()) {
      auto& top = stack.back();
      Node* n = top.first;
      if (top.second < n->parents.size()) {
        Node* p = n->parents[top.second].get();
        ++top.second;
        if (p->requires_grad && !visited.contains(p)) {
          visited.insert(p);
          stack.push_back({p, 0});
        }
      } else {
        order.push_back(n);
        stack.pop_back();
      }
    }

    if (!root->has_grad) {
      root->grad = M::Ones(1, 1);
      root->has_grad = true;
    } else {
      root->grad(0, 0) += Scalar(1);
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      Node* n = *it;
      if (n->backprop && n->has_grad) n->backprop(n->grad);
    }
  }

  NodePtr node() const { return node_; }

 private:
  const NodePtr& check() const {
    if (!node_) throw ContractError("operation on an empty tensor");
    return node_;
  }

  NodePtr node_;
};

using Tensor = BasicTensor<double>;

namespace detail {

template <typename Scalar, typename Expr>
void accumulate(const std::shared_ptr<TensorNode<Scalar>>& p, const Expr& g) {
  if (!p->requires_grad) return;
  if (!p->has_grad) {
    p->grad = g;
    p->has_grad = true;
  } else {
    p->grad += g;
  }
}

template <typename Scalar>
void accumulate_block(const std::shared_ptr<TensorNode<Scalar>>& p, Index r0,
                      Index c0, const DenseMatrix<Scalar>& g) {
  if (!p->requires_grad) return;
  if (!p->has_grad) {
    p->grad = DenseMatrix<Scalar>::Zero(p->value.rows(), p->value.cols());
    p->has_grad = true;
  }
  p->grad.block(r0, c0, g.rows(), g.cols()) += g;
}

/// Wraps a freshly computed value; records parents and the closure only when
/// some input participates in the graph.
template <typename Scalar, typename F>
BasicTensor<Scalar> make_op(
    DenseMatrix<Scalar> value,
    std::vector<std::shared_ptr<TensorNode<Scalar>>> inputs, F&& backprop) {
  auto n = std::make_shared<TensorNode<Scalar>>();
  n->value = std::move(value);
  n->id = TensorNode<Scalar>::next_id();
  bool tracked = false;
  for (const auto& in : inputs)
    if (in->requires_grad) tracked = true;
  if (tracked) {
    n->requires_grad = true;
    n->parents = std::move(inputs);
    n->backprop = std::forward<F>(backprop);
  }
  return BasicTensor<Scalar>(std::move(n));
}

template <typename Scalar>
bool is_scalar_shaped(const DenseMatrix<Scalar>& m) {
  return m.rows() == 1 && m.cols() == 1;
}

template <typename Scalar>
Scalar stable_sigmoid(Scalar x) {
  if (x >= Scalar(0)) return Scalar(1) / (Scalar(1) + std::exp(-x));
  Scalar e = std::exp(x);
  return e / (Scalar(1) + e);
}

}  // namespace detail

template <typename Scalar>
BasicTensor<Scalar> constant(DenseMatrix<Scalar> value) {
  return BasicTensor<Scalar>::constant(std::move(value));
}

inline Tensor constant(Matrix value) { return Tensor::constant(std::move(value)); }

inline Tensor scalar_constant(double v) {
  return Tensor::constant(Matrix::Constant(1, 1, v));
}

/// Severs the graph: same value, no history, no gradient flow.
template <typename Scalar>
BasicTensor<Scalar> detach(const BasicTensor<Scalar>& x) {
  return BasicTensor<Scalar>::constant(x.value());
}

// ---- elementwise arithmetic ------------------------------------------------
// add/sub/mul accept equal shapes, or a 1x1 operand broadcast against the
// other side; the scalar side accumulates the summed gradient.

template <typename Scalar>
BasicTensor<Scalar> add(const BasicTensor<Scalar>& a, const BasicTensor<Scalar>& b) {
  using M = DenseMatrix<Scalar>;
  const M& av = a.value();
  const M& bv = b.value();
  M out;
  if (av.rows() == bv.rows() && av.cols() == bv.cols()) {
    out = av + bv;
  } else if (detail::is_scalar_shaped(av)) {
    out = (bv.array() + av(0, 0)).matrix();
  } else if (detail::is_scalar_shaped(bv)) {
    out = (av.array() + bv(0, 0)).matrix();
  } else {
    throw ShapeError("add: shapes " + shape_str(av.rows(), av.cols()) + " and " +
                     shape_str(bv.rows(), bv.cols()) + " do not match");
  }
  auto an = a.node();
  auto bn = b.node();
  return detail::make_op<Scalar>(std::move(out), {an, bn}, [an, bn](const M& g) {
    if (detail::is_scalar_shaped(an->value) && !detail::is_scalar_shaped(g))
      detail::accumulate(an, M::Constant(1, 1, g.sum()));
    else
      detail::accumulate(an, g);
    if (detail::is_scalar_shaped(bn->value) && !detail::is_scalar_shaped(g))
      detail::accumulate(bn, M::Constant(1, 1, g.sum()));
    else
      detail::accumulate(bn, g);
  });
}

template <typename Scalar>
BasicTensor<Scalar> sub(const BasicTensor<Scalar>& a, const BasicTensor<Scalar>& b) {
  using M = DenseMatrix<Scalar>;
  const M& av = a.value();
  const M& bv = b.value();
  M out;
  if (av.rows() == bv.rows() && av.cols() == bv.cols()) {
    out = av - bv;
  } else if (detail::is_scalar_shaped(av)) {
    out = (av(0, 0) - bv.array()).matrix();
  } else if (detail::is_scalar_shaped(bv)) {
    out = (av.array() - bv(0, 0)).matrix();
  } else {
    throw ShapeError("sub: shapes " + shape_str(av.rows(), av.cols()) + " and " +
                     shape_str(bv.rows(), bv.cols()) + " do not match");
  }
  auto an = a.node();
  auto bn = b.node();
  return detail::make_op<Scalar>(std::move(out), {an, bn}, [an, bn](const M& g) {
    if (detail::is_scalar_shaped(an->value) && !detail::is_scalar_shaped(g))
      detail::accumulate(an, M::Constant(1, 1, g.sum()));
    else
      detail::accumulate(an, g);
    M ng = -g;
    if (detail::is_scalar_shaped(bn->value) && !detail::is_scalar_shaped(g))
      detail::accumulate(bn, M::Constant(1, 1, ng.sum()));
    else
      detail::accumulate(bn, ng);
  });
}

template <typename Scalar>
BasicTensor<Scalar> mul(const BasicTensor<Scalar>& a, const BasicTensor<Scalar>& b) {
  using M = DenseMatrix<Scalar>;
  const M& av = a.value();
  const M& bv = b.value();
  M out;
  if (av.rows() == bv.rows() && av.cols() == bv.cols()) {
    out = av.cwiseProduct(bv);
  } else if (detail::is_scalar_shaped(av)) {
    out = bv * av(0, 0);
  } else if (detail::is_scalar_shaped(bv)) {
    out = av * bv(0, 0);
  } else {
    throw ShapeError("mul: shapes " + shape_str(av.rows(), av.cols()) + " and " +
                     shape_str(bv.rows(), bv.cols()) + " do not match");
  }
  auto an = a.node();
  auto bn = b.node();
  return detail::make_op<Scalar>(std::move(out), {an, bn}, [an, bn](const M& g) {
    const M& av2 = an->value;
    const M& bv2 = bn->value;
    if (detail::is_scalar_shaped(av2) && !detail::is_scalar_shaped(g)) {
      detail::accumulate(an, M::Constant(1, 1, g.cwiseProduct(bv2).sum()));
      detail::accumulate(bn, M(g * av2(0, 0)));
    } else if (detail::is_scalar_shaped(bv2) && !detail::is_scalar_shaped(g)) {
      detail::accumulate(an, M(g * bv2(0, 0)));
      detail::accumulate(bn, M::Constant(1, 1, g.cwiseProduct(av2).sum()));
    } else {
      detail::accumulate(an, M(g.cwiseProduct(bv2)));
      detail::accumulate(bn, M(g.cwiseProduct(av2)));
    }
  });
}

template <typename Scalar>
BasicTensor<Scalar> scale(const BasicTensor<Scalar>& x, Scalar c) {
  using M = DenseMatrix<Scalar>;
  auto xn = x.node();
  return detail::make_op<Scalar>(M(x.value() * c), {xn}, [xn, c](const M& g) {
    detail::accumulate(xn, M(g * c));
  });
}

template <typename Scalar>
BasicTensor<Scalar> operator+(const BasicTensor<Scalar>& a, const BasicTensor<Scalar>& b) {
  return add(a, b);
}
template <typename Scalar>
BasicTensor<Scalar> operator-(const BasicTensor<Scalar>& a, const BasicTensor<Scalar>& b) {
  return sub(a, b);
}
template <typename Scalar>
BasicTensor<Scalar> operator*(const BasicTensor<Scalar>& a, const BasicTensor<Scalar>& b) {
  return mul(a, b);
}
template <typename Scalar>
BasicTensor<Scalar> operator-(const BasicTensor<Scalar>& x) {
  return scale(x, Scalar(-1));
}

// ---- linear algebra --------------------------------------------------------

template <typename Scalar>
BasicTensor<Scalar> matmul(const BasicTensor<Scalar>& a, const BasicTensor<Scalar>& b) {
  using M = DenseMatrix<Scalar>;
  const M& av = a.value();
  const M& bv = b.value();
  if (av.cols() != bv.rows())
    throw ShapeError("matmul: incompatible shapes " + shape_str(av.rows(), av.cols()) +
                     " and " + shape_str(bv.rows(), bv.cols()));
  auto an = a.node();
  auto bn = b.node();
  return detail::make_op<Scalar>(M(av * bv), {an, bn}, [an, bn](const M& g) {
    detail::accumulate(an, M(g * bn->value.transpose()));
    detail::accumulate(bn, M(an->value.transpose() * g));
  });
}

// ---- pointwise nonlinearities ----------------------------------------------

template <typename Scalar>
BasicTensor<Scalar> relu(const BasicTensor<Scalar>& x) {
  using M = DenseMatrix<Scalar>;
  auto xn = x.node();
  M out = x.value().cwiseMax(Scalar(0));
  return detail::make_op<Scalar>(std::move(out), {xn}, [xn](const M& g) {
    // subgradient 0 at the kink
    M masked = ((xn->value.array() > Scalar(0)).template cast<Scalar>() * g.array()).matrix();
    detail::accumulate(xn, masked);
  });
}

template <typename Scalar>
BasicTensor<Scalar> sigmoid(const BasicTensor<Scalar>& x) {
  using M = DenseMatrix<Scalar>;
  auto xn = x.node();
  M s = x.value().unaryExpr([](Scalar v) { return detail::stable_sigmoid(v); });
  M s_copy = s;
  return detail::make_op<Scalar>(std::move(s), {xn}, [xn, s_copy](const M& g) {
    M ds = (s_copy.array() * (Scalar(1) - s_copy.array()) * g.array()).matrix();
    detail::accumulate(xn, ds);
  });
}

/// log(1 + e^x) computed as max(x, 0) + log1p(e^{-|x|}); exact for large |x|.
template <typename Scalar>
BasicTensor<Scalar> softplus(const BasicTensor<Scalar>& x) {
  using M = DenseMatrix<Scalar>;
  auto xn = x.node();
  M out = x.value().unaryExpr([](Scalar v) {
    return std::max(v, Scalar(0)) + std::log1p(std::exp(-std::abs(v)));
  });
  return detail::make_op<Scalar>(std::move(out), {xn}, [xn](const M& g) {
    M ds = xn->value.unaryExpr([](Scalar v) { return detail::stable_sigmoid(v); });
    detail::accumulate(xn, M(ds.cwiseProduct(g)));
  });
}

template <typename Scalar>
BasicTensor<Scalar> exp(const BasicTensor<Scalar>& x) {
  using M = DenseMatrix<Scalar>;
  auto xn = x.node();
  M out = x.value().array().exp().matrix();
  M out_copy = out;
  return detail::make_op<Scalar>(std::move(out), {xn}, [xn, out_copy](const M& g) {
    detail::accumulate(xn, M(g.cwiseProduct(out_copy)));
  });
}

template <typename Scalar>
BasicTensor<Scalar> log(const BasicTensor<Scalar>& x) {
  using M = DenseMatrix<Scalar>;
  auto xn = x.node();
  M out = x.value().array().log().matrix();
  return detail::make_op<Scalar>(std::move(out), {xn}, [xn](const M& g) {
    detail::accumulate(xn, M(g.cwiseQuotient(xn->value)));
  });
}

// ---- reductions and shape ops ----------------------------------------------

template <typename Scalar>
BasicTensor<Scalar> sum(const BasicTensor<Scalar>& x) {
  using M = DenseMatrix<Scalar>;
  auto xn = x.node();
  M out = M::Constant(1, 1, x.value().sum());
  return detail::make_op<Scalar>(std::move(out), {xn}, [xn](const M& g) {
    detail::accumulate(xn, M::Constant(xn->value.rows(), xn->value.cols(), g(0, 0)));
  });
}

template <typename Scalar>
BasicTensor<Scalar> mean(const BasicTensor<Scalar>& x) {
  using M = DenseMatrix<Scalar>;
  auto xn = x.node();
  auto n = static_cast<Scalar>(x.value().size());
  M out = M::Constant(1, 1, x.value().sum() / n);
  return detail::make_op<Scalar>(std::move(out), {xn}, [xn, n](const M& g) {
    detail::accumulate(xn,
                       M::Constant(xn->value.rows(), xn->value.cols(), g(0, 0) / n));
  });
}

/// Row sums: BxK -> Bx1.
template <typename Scalar>
BasicTensor<Scalar> sum_rows(const BasicTensor<Scalar>& x) {
  using M = DenseMatrix<Scalar>;
  auto xn = x.node();
  M out = x.value().rowwise().sum();
  return detail::make_op<Scalar>(std::move(out), {xn}, [xn](const M& g) {
    detail::accumulate(xn, M(g.replicate(1, xn->value.cols())));
  });
}

/// Repeats a 1xD row n times; the usual bias-broadcast for batched affine maps.
template <typename Scalar>
BasicTensor<Scalar> tile_rows(const BasicTensor<Scalar>& x, Index n) {
  using M = DenseMatrix<Scalar>;
  const M& v = x.value();
  if (v.rows() != 1)
    throw ShapeError("tile_rows: expected a 1xD row, got " + shape_str(v.rows(), v.cols()));
  if (n < 1) throw ShapeError("tile_rows: count must be positive");
  auto xn = x.node();
  return detail::make_op<Scalar>(M(v.replicate(n, 1)), {xn}, [xn](const M& g) {
    detail::accumulate(xn, M(g.colwise().sum()));
  });
}

template <typename Scalar>
BasicTensor<Scalar> concat_rows(const BasicTensor<Scalar>& a, const BasicTensor<Scalar>& b) {
  using M = DenseMatrix<Scalar>;
  const M& av = a.value();
  const M& bv = b.value();
  if (av.cols() != bv.cols())
    throw ShapeError("concat_rows: column counts differ, " +
                     shape_str(av.rows(), av.cols()) + " vs " +
                     shape_str(bv.rows(), bv.cols()));
  M out(av.rows() + bv.rows(), av.cols());
  out.topRows(av.rows()) = av;
  out.bottomRows(bv.rows()) = bv;
  auto an = a.node();
  auto bn = b.node();
  Index ra = av.rows();
  return detail::make_op<Scalar>(std::move(out), {an, bn}, [an, bn, ra](const M& g) {
    detail::accumulate(an, M(g.topRows(ra)));
    detail::accumulate(bn, M(g.bottomRows(g.rows() - ra)));
  });
}

template <typename Scalar>
BasicTensor<Scalar> concat_cols(const BasicTensor<Scalar>& a, const BasicTensor<Scalar>& b) {
  using M = DenseMatrix<Scalar>;
  const M& av = a.value();
  const M& bv = b.value();
  if (av.rows() != bv.rows())
    throw ShapeError("concat_cols: row counts differ, " +
                     shape_str(av.rows(), av.cols()) + " vs " +
                     shape_str(bv.rows(), bv.cols()));
  M out(av.rows(), av.cols() + bv.cols());
  out.leftCols(av.cols()) = av;
  out.rightCols(bv.cols()) = bv;
  auto an = a.node();
  auto bn = b.node();
  Index ca = av.cols();
  return detail::make_op<Scalar>(std::move(out), {an, bn}, [an, bn, ca](const M& g) {
    detail::accumulate(an, M(g.leftCols(ca)));
    detail::accumulate(bn, M(g.rightCols(g.cols() - ca)));
  });
}

template <typename Scalar>
BasicTensor<Scalar> slice_rows(const BasicTensor<Scalar>& x, Index start, Index count) {
  using M = DenseMatrix<Scalar>;
  const M& v = x.value();
  if (start < 0 || count < 1 || start + count > v.rows())
    throw ShapeError("slice_rows: rows [" + std::to_string(start) + ", " +
                     std::to_string(start + count) + ") out of range for " +
                     shape_str(v.rows(), v.cols()));
  auto xn = x.node();
  return detail::make_op<Scalar>(M(v.middleRows(start, count)), {xn},
                                 [xn, start](const M& g) {
                                   detail::accumulate_block(xn, start, Index{0}, g);
                                 });
}

template <typename Scalar>
BasicTensor<Scalar> slice_cols(const BasicTensor<Scalar>& x, Index start, Index count) {
  using M = DenseMatrix<Scalar>;
  const M& v = x.value();
  if (start < 0 || count < 1 || start + count > v.cols())
    throw ShapeError("slice_cols: cols [" + std::to_string(start) + ", " +
                     std::to_string(start + count) + ") out of range for " +
                     shape_str(v.rows(), v.cols()));
  auto xn = x.node();
  return detail::make_op<Scalar>(M(v.middleCols(start, count)), {xn},
                                 [xn, start](const M& g) {
                                   detail::accumulate_block(xn, Index{0}, start, g);
                                 });
}

/// Rowwise log-softmax, max-shifted so large logits cannot overflow.
template <typename Scalar>
BasicTensor<Scalar> log_softmax(const BasicTensor<Scalar>& x) {
  using M = DenseMatrix<Scalar>;
  const M& v = x.value();
  M out(v.rows(), v.cols());
  for (Index i = 0; i < v.rows(); ++i) {
    Scalar m = v.row(i).maxCoeff();
    Scalar lse = std::log((v.row(i).array() - m).exp().sum());
    out.row(i) = v.row(i).array() - m - lse;
  }
  auto xn = x.node();
  M out_copy = out;
  return detail::make_op<Scalar>(std::move(out), {xn}, [xn, out_copy](const M& g) {
    M soft = out_copy.array().exp().matrix();
    M row_sums = g.rowwise().sum();
    M dx = g - soft.cwiseProduct(row_sums.replicate(1, g.cols()));
    detail::accumulate(xn, dx);
  });
}

/// Constant BxK indicator matrix; labels must lie in [0, classes).
template <typename Scalar = double>
BasicTensor<Scalar> one_hot(const std::vector<int>& labels, int classes) {
  using M = DenseMatrix<Scalar>;
  if (classes < 2) throw DataError("one_hot: need at least 2 classes");
  M out = M::Zero(static_cast<Index>(labels.size()), classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    int u = labels[i];
    if (u < 0 || u >= classes)
      throw DataError("one_hot: label " + std::to_string(u) + " at row " +
                      std::to_string(i) + " outside [0, " + std::to_string(classes) + ")");
    out(static_cast<Index>(i), u) = Scalar(1);
  }
  return BasicTensor<Scalar>::constant(std::move(out));
}

// ---- finite-difference gradient checking ------------------------------------

struct GradCheckEntry {
  Index row = 0;
  Index col = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double rel_error = 0.0;
  bool non_smooth = false;  // one-sided slopes disagree; excluded from pass
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double max_rel_error = 0.0;  // over smooth coordinates
  Index checked = 0;
  Index flagged = 0;
  bool pass = false;
};

/// Central-difference check of d f / d point against the recorded gradients.
/// f maps one tensor to a 1x1 tensor and must be deterministic. Coordinates
/// where the two one-sided slopes disagree (a kink within h) are flagged and
/// excluded from the pass decision instead of producing a spurious failure.
template <typename F>
GradCheckReport grad_check(F&& f, const Matrix& point, double h = 1e-5,
                           double tol = 1e-4) {
  Tensor p = Tensor::parameter(point);
  Tensor out = f(p);
  if (out.rows() != 1 || out.cols() != 1)
    throw ContractError("grad_check: f must return a 1x1 tensor, got " +
                        shape_str(out.rows(), out.cols()));
  out.backward();
  Matrix analytic = p.grad();

  auto eval = [&](const Matrix& at) {
    Tensor c = Tensor::constant(at);
    return f(c).item();
  };
  double f0 = eval(point);

  GradCheckReport report;
  report.entries.reserve(static_cast<std::size_t>(point.size()));
  for (Index i = 0; i < point.rows(); ++i) {
    for (Index j = 0; j < point.cols(); ++j) {
      Matrix plus = point;
      Matrix minus = point;
      plus(i, j) += h;
      minus(i, j) -= h;
      double fp = eval(plus);
      double fm = eval(minus);
      double central = (fp - fm) / (2.0 * h);
      double fwd = (fp - f0) / h;
      double bwd = (f0 - fm) / h;

      GradCheckEntry e;
      e.row = i;
      e.col = j;
      e.analytic = analytic(i, j);
      e.numeric = central;
      e.non_smooth =
          std::abs(fwd - bwd) > 1e-2 * std::max(1.0, std::abs(central));
      e.rel_error = std::abs(e.analytic - e.numeric) /
                    std::max({std::abs(e.analytic), std::abs(e.numeric), 1.0});
      if (e.non_smooth)
        ++report.flagged;
      else
        report.max_rel_error = std::max(report.max_rel_error, e.rel_error);
      ++report.checked;
      report.entries.push_back(e);
    }
  }
  report.pass = report.max_rel_error <= tol;
  return report;
}

}  // namespace tiprdc
