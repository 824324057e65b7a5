// Copyright 2026 the cfscale authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "cfscale/losses.hpp"

namespace cfscale {

enum class ObjectiveKind { Bpr, BprDrop, SglComposite };

struct ObjectiveConfig {
  ObjectiveKind kind = ObjectiveKind::Bpr;
  DropConfig drop;
  bool sgl_item_term = true;
};

struct Gradients {
  Matrix user_emb;
  Matrix item_emb;
  std::vector<Matrix> mlp_weights;
  std::vector<Eigen::VectorXd> mlp_biases;
  Eigen::VectorXd fusion;
};

Gradients zero_gradients(const Params& params);

// Forward-only loss for the configured objective; the finite-difference
// oracle in the tests differentiates exactly this function.
double objective_loss(const ModelKind& kind, const Params& params,
                      const NormAdj* adj, const Batch& batch,
                      const ObjectiveConfig& cfg,
                      const SglViews* views = nullptr);

// Analytic gradient of objective_loss with respect to every Params field.
Gradients compute_gradients(const ModelKind& kind, const Params& params,
                            const NormAdj* adj, const Batch& batch,
                            const ObjectiveConfig& cfg,
                            const SglViews* views = nullptr,
                            double* loss_out = nullptr);

}  // namespace cfscale
