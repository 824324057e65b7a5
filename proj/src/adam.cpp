// Copyright 2026 the cfscale authors
// SPDX-License-Identifier: Apache-2.0

#include "cfscale/adam.hpp"

#include <cmath>

#include "cfscale/errors.hpp"

namespace cfscale {

AdamState make_adam_state(const Params& params) {
  AdamState s;
  s.first_moment = zero_gradients(params);
  s.second_moment = zero_gradients(params);
  return s;
}

namespace {

template <typename M>
void update(M& theta, const M& grad, M& m1, M& m2, const AdamState& s,
            double lr) {
  if (!grad.allFinite()) throw NumericError("non-finite gradient in Adam step");
  const double bc1 = 1.0 - std::pow(s.beta1, (double)s.t);
  const double bc2 = 1.0 - std::pow(s.beta2, (double)s.t);
  m1 = s.beta1 * m1 + (1.0 - s.beta1) * grad;
  m2 = (s.beta2 * m2.array() + (1.0 - s.beta2) * grad.array().square()).matrix();
  theta.array() -=
      lr * (m1.array() / bc1) / ((m2.array() / bc2).sqrt() + s.eps);
}

}  // namespace

void adam_step(Params& params, const Gradients& grads, AdamState& state,
               double lr) {
  ++state.t;
  update(params.user_emb, grads.user_emb, state.first_moment.user_emb,
         state.second_moment.user_emb, state, lr);
  update(params.item_emb, grads.item_emb, state.first_moment.item_emb,
         state.second_moment.item_emb, state, lr);
  for (std::size_t l = 0; l < params.mlp_weights.size(); ++l) {
    update(params.mlp_weights[l], grads.mlp_weights[l],
           state.first_moment.mlp_weights[l], state.second_moment.mlp_weights[l],
           state, lr);
    update(params.mlp_biases[l], grads.mlp_biases[l],
           state.first_moment.mlp_biases[l], state.second_moment.mlp_biases[l],
           state, lr);
  }
  if (params.fusion.size() > 0)
    update(params.fusion, grads.fusion, state.first_moment.fusion,
           state.second_moment.fusion, state, lr);
}

}  // namespace cfscale
