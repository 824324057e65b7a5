// Copyright 2026 the cfscale authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "cfscale/adjacency.hpp"
#include "cfscale/model.hpp"

namespace cfscale {

struct Triple {
  int user;
  int pos_item;
  int neg_item;
};

using Batch = std::vector<Triple>;

struct DropConfig {
  double save_ratio = 1.0;   // fraction of lowest/highest-loss samples kept
  bool get_low = true;       // true: keep the lowest-loss samples
  double gamma_eps = 1e-10;  // numeric floor inside the log

  // optional fixed-threshold mode: keep samples with loss <= threshold
  // (get_low) or >= threshold; at least one sample is always kept
  bool use_fixed_threshold = false;
  double threshold = 0.0;
};

// Per-sample -ln(gamma_eps + sigmoid(pos - neg)).
Eigen::VectorXd per_sample_bpr_losses(const Eigen::VectorXd& pos_scores,
                                      const Eigen::VectorXd& neg_scores,
                                      double gamma_eps = 1e-10);

double bpr_loss(const Eigen::VectorXd& pos_scores,
                const Eigen::VectorXd& neg_scores);

// Indices of the kept samples, ascending. k = max(floor(N*save_ratio), 1);
// ties broken by ascending original index.
std::vector<int> drop_selection(const Eigen::VectorXd& losses,
                                const DropConfig& cfg);

double bpr_drop_loss(const Eigen::VectorXd& pos_scores,
                     const Eigen::VectorXd& neg_scores,
                     const DropConfig& cfg);

// In-batch InfoNCE over cosine similarities; rows of the two views are
// aligned by index, denominator runs over all rows including the diagonal.
double contrastive_loss(const Matrix& view1_rows, const Matrix& view2_rows,
                        double tau);

struct SglViews {
  NormAdj view1;
  NormAdj view2;
};

SglViews make_sgl_views(const NormAdj& adj, double rho, std::uint64_t seed);

// L = L_BPR(main graph) + gamma * (user-side InfoNCE + item-side InfoNCE).
// The item-side term can be disabled via include_item_term.
double sgl_total_loss(const Batch& batch, const Params& params,
                      const NormAdj& adj, const SglViews& views,
                      const ModelKind& kind, bool include_item_term = true);

}  // namespace cfscale
