#pragma once

#include <vector>

#include "tiprdc/nn.hpp"
#include "tiprdc/rng.hpp"
#include "tiprdc/tensor.hpp"

namespace tiprdc {

/// Mean negative log-likelihood of the labels under rowwise softmax(logits).
Tensor cross_entropy_loss(const Tensor& logits, const std::vector<int>& labels);

/// One batch prepared for the mutual-information bound: the joint rows
/// (x, u) and a product-of-marginals surrogate x_marginal built by permuting
/// x within the batch with a fixed-point-free permutation, so no row is ever
/// paired with itself.
struct JsdBatchPair {
  Tensor x;
  Tensor u_onehot;
  Tensor x_marginal;  // constant; negatives never feed gradients
  std::vector<Index> permutation;
};

JsdBatchPair make_negative_batch(const Tensor& x, const Tensor& u_onehot,
                                 RngStream& rng);

/// Jensen-Shannon lower bound from raw critic scores:
///   mean(-softplus(-t_joint)) - mean(softplus(t_marginal)).
/// Always <= 0; equals -2 ln 2 when every score is zero.
Tensor jsd_bound_from_scores(const Tensor& t_joint, const Tensor& t_marginal);

/// Scores the joint and shuffled batches with the critic and assembles the
/// bound. z must be the representation of pair.x.
Tensor jsd_mi_bound(const Critic& critic, const Tensor& z, const JsdBatchPair& pair);

}  // namespace tiprdc
