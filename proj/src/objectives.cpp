#include "tiprdc/objectives.hpp"

namespace tiprdc {

Tensor cross_entropy_loss(const Tensor& logits, const std::vector<int>& labels) {
  if (static_cast<std::size_t>(logits.rows()) != labels.size())
    throw ShapeError("cross_entropy_loss: " + std::to_string(logits.rows()) +
                     " rows vs " + std::to_string(labels.size()) + " labels");
  if (logits.cols() < 2)
    throw ShapeError("cross_entropy_loss: need at least 2 classes, got " +
                     std::to_string(logits.cols()));
  Tensor targets = one_hot(labels, static_cast<int>(logits.cols()));
  Tensor picked = sum_rows(mul(targets, log_softmax(logits)));
  return scale(mean(picked), -1.0);
}

JsdBatchPair make_negative_batch(const Tensor& x, const Tensor& u_onehot,
                                 RngStream& rng) {
  if (x.rows() != u_onehot.rows())
    throw ShapeError("make_negative_batch: x has " + std::to_string(x.rows()) +
                     " rows, u has " + std::to_string(u_onehot.rows()));
  if (x.rows() < 2)
    throw DataError("make_negative_batch: need at least 2 rows, got " +
                    std::to_string(x.rows()));
  JsdBatchPair pair;
  pair.x = x;
  pair.u_onehot = u_onehot;
  pair.permutation = rng.derangement(x.rows());
  Matrix shuffled(x.rows(), x.cols());
  for (Index i = 0; i < x.rows(); ++i)
    shuffled.row(i) = x.value().row(pair.permutation[static_cast<std::size_t>(i)]);
  pair.x_marginal = Tensor::constant(std::move(shuffled));
  return pair;
}

Tensor jsd_bound_from_scores(const Tensor& t_joint, const Tensor& t_marginal) {
  if (t_joint.cols() != 1 || t_marginal.cols() != 1)
    throw ShapeError("jsd_bound_from_scores: scores must be column vectors, got " +
                     shape_str(t_joint.rows(), t_joint.cols()) + " and " +
                     shape_str(t_marginal.rows(), t_marginal.cols()));
  Tensor joint_term = mean(scale(softplus(scale(t_joint, -1.0)), -1.0));
  Tensor marginal_term = mean(softplus(t_marginal));
  return sub(joint_term, marginal_term);
}

Tensor jsd_mi_bound(const Critic& critic, const Tensor& z, const JsdBatchPair& pair) {
  Tensor t_joint = critic.score(pair.x, z, pair.u_onehot);
  Tensor t_marginal = critic.score(pair.x_marginal, z, pair.u_onehot);
  return jsd_bound_from_scores(t_joint, t_marginal);
}

}  // namespace tiprdc
