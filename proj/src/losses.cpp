// Copyright 2026 the cfscale authors
// SPDX-License-Identifier: Apache-2.0

#include "cfscale/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cfscale/errors.hpp"

namespace cfscale {

Eigen::VectorXd per_sample_bpr_losses(const Eigen::VectorXd& pos_scores,
                                      const Eigen::VectorXd& neg_scores,
                                      double gamma_eps) {
  if (pos_scores.size() != neg_scores.size() || pos_scores.size() == 0)
    throw ShapeError("pos/neg score vectors must have equal nonzero length");
  Eigen::VectorXd out(pos_scores.size());
  for (Eigen::Index t = 0; t < pos_scores.size(); ++t) {
    double sig = 1.0 / (1.0 + std::exp(-(pos_scores[t] - neg_scores[t])));
    out[t] = -std::log(gamma_eps + sig);
  }
  return out;
}

double bpr_loss(const Eigen::VectorXd& pos_scores,
                const Eigen::VectorXd& neg_scores) {
  Eigen::VectorXd losses = per_sample_bpr_losses(pos_scores, neg_scores);
  // sequential sum, bit-identical to the drop path with full retention
  double sum = 0.0;
  for (Eigen::Index t = 0; t < losses.size(); ++t) sum += losses[t];
  return sum / (double)losses.size();
}

std::vector<int> drop_selection(const Eigen::VectorXd& losses,
                                const DropConfig& cfg) {
  if (cfg.save_ratio <= 0.0 || cfg.save_ratio > 1.0)
    throw ConfigError("save_ratio must lie in (0,1]");
  const int n = (int)losses.size();

  if (cfg.use_fixed_threshold) {
    std::vector<int> kept;
    for (int i = 0; i < n; ++i)
      if (cfg.get_low ? losses[i] <= cfg.threshold
                      : losses[i] >= cfg.threshold)
        kept.push_back(i);
    if (!kept.empty()) return kept;
    // fall through to keep the single best sample
  }

  int k = cfg.use_fixed_threshold
              ? 1
              : std::max((int)((double)n * cfg.save_ratio), 1);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (losses[a] != losses[b])
      return cfg.get_low ? losses[a] < losses[b] : losses[a] > losses[b];
    return a < b;  // tie: ascending original index
  });
  order.resize(k);
  std::sort(order.begin(), order.end());
  return order;
}

double bpr_drop_loss(const Eigen::VectorXd& pos_scores,
                     const Eigen::VectorXd& neg_scores,
                     const DropConfig& cfg) {
  Eigen::VectorXd losses =
      per_sample_bpr_losses(pos_scores, neg_scores, cfg.gamma_eps);
  auto kept = drop_selection(losses, cfg);
  double sum = 0.0;
  for (int i : kept) sum += losses[i];
  return sum / (double)kept.size();
}

double contrastive_loss(const Matrix& view1_rows, const Matrix& view2_rows,
                        double tau) {
  if (view1_rows.rows() != view2_rows.rows() ||
      view1_rows.cols() != view2_rows.cols() || view1_rows.rows() == 0)
    throw ShapeError("contrastive views must have equal nonzero shapes");
  if (tau <= 0.0) throw ConfigError("temperature must be positive");
  const int b = (int)view1_rows.rows();

  Eigen::VectorXd norm1(b), norm2(b);
  for (int r = 0; r < b; ++r) {
    norm1[r] = view1_rows.row(r).norm();
    norm2[r] = view2_rows.row(r).norm();
    if (norm1[r] == 0.0 || norm2[r] == 0.0)
      throw NumericError("degenerate zero-norm embedding row " +
                         std::to_string(r));
  }
  double total = 0.0;
  for (int u = 0; u < b; ++u) {
    Eigen::VectorXd sims(b);
    for (int v = 0; v < b; ++v)
      sims[v] =
          view1_rows.row(u).dot(view2_rows.row(v)) / (norm1[u] * norm2[v] * tau);
    double mx = sims.maxCoeff();
    double lse = mx + std::log((sims.array() - mx).exp().sum());
    total += -(sims[u] - lse);
  }
  return total / (double)b;
}

SglViews make_sgl_views(const NormAdj& adj, double rho, std::uint64_t seed) {
  AugmentSpec a{AugmentSpec::Kind::EdgeDropout, rho, seed};
  AugmentSpec b{AugmentSpec::Kind::EdgeDropout, rho, seed ^ 0x9e3779b97f4a7c15ull};
  return {edge_dropout(adj, a), edge_dropout(adj, b)};
}

namespace {

// Sorted unique row indices in stacked (m+n) space.
std::pair<std::vector<int>, std::vector<int>> batch_nodes(const Batch& batch,
                                                          int m) {
  std::vector<int> users, items;
  for (const auto& t : batch) {
    users.push_back(t.user);
    items.push_back(m + t.pos_item);
  }
  auto uniq = [](std::vector<int>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  uniq(users);
  uniq(items);
  return {users, items};
}

Matrix gather_rows(const Matrix& src, const std::vector<int>& rows) {
  Matrix out((int)rows.size(), src.cols());
  for (int r = 0; r < (int)rows.size(); ++r) out.row(r) = src.row(rows[r]);
  return out;
}

}  // namespace

double sgl_total_loss(const Batch& batch, const Params& params,
                      const NormAdj& adj, const SglViews& views,
                      const ModelKind& kind, bool include_item_term) {
  if (batch.empty()) throw ConfigError("empty batch");
  Matrix e0 = params.stacked();
  Matrix main = propagate(adj, e0, kind.layers);

  Eigen::VectorXd pos((int)batch.size()), neg((int)batch.size());
  for (int t = 0; t < (int)batch.size(); ++t) {
    const auto& tr = batch[t];
    pos[t] = main.row(tr.user).dot(main.row(params.m() + tr.pos_item));
    neg[t] = main.row(tr.user).dot(main.row(params.m() + tr.neg_item));
  }
  double loss = bpr_loss(pos, neg);

  Matrix z1 = propagate(views.view1, e0, kind.layers);
  Matrix z2 = propagate(views.view2, e0, kind.layers);
  auto [users, items] = batch_nodes(batch, params.m());
  double cont = contrastive_loss(gather_rows(z1, users), gather_rows(z2, users),
                                 kind.tau);
  if (include_item_term)
    cont += contrastive_loss(gather_rows(z1, items), gather_rows(z2, items),
                             kind.tau);
  return loss + kind.gamma * cont;
}

}  // namespace cfscale
