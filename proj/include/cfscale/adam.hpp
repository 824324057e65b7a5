// Copyright 2026 the cfscale authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "cfscale/gradients.hpp"

namespace cfscale {

struct AdamState {
  Gradients first_moment;
  Gradients second_moment;
  long t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

AdamState make_adam_state(const Params& params);

// Standard bias-corrected Adam update, applied in place.
void adam_step(Params& params, const Gradients& grads, AdamState& state,
               double lr);

}  // namespace cfscale
