// Copyright 2026 the cfscale authors
// SPDX-License-Identifier: Apache-2.0

#include "cfscale/trainer.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <numeric>

#include "cfscale/errors.hpp"

namespace cfscale {

void TrainHistory::export_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open output file: " + path);
  out << "epoch,train_loss,valid_ndcg\n";
  out.precision(10);
  for (const auto& e : epochs)
    out << e.epoch << "," << e.train_loss << "," << e.valid_ndcg << "\n";
}

TrainResult train(const ModelKind& kind, const Dataset& train_data,
                  const Dataset& valid_data, const TrainConfig& cfg) {
  if (train_data.interactions.empty())
    throw ConfigError("training dataset is empty");
  if (cfg.lr <= 0.0 || cfg.batch_size < 1 || cfg.patience < 1 || cfg.dim < 1)
    throw ConfigError("invalid training configuration");

  std::mt19937_64 rng(cfg.seed);
  Params params =
      init_params(kind, train_data.m, train_data.n, cfg.dim, cfg.seed);
  AdamState adam = make_adam_state(params);

  NormAdj adj;
  if (kind.is_graph()) adj = build_normalized_adjacency(train_data);
  const NormAdj* adj_ptr = kind.is_graph() ? &adj : nullptr;

  TrainResult result;
  result.params = params;
  double best_ndcg = -std::numeric_limits<double>::infinity();
  int epochs_since_improve = 0;

  std::vector<std::size_t> order(train_data.count());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);

    SglViews views;
    const SglViews* views_ptr = nullptr;
    if (cfg.objective.kind == ObjectiveKind::SglComposite) {
      // views resampled once per epoch
      views = make_sgl_views(adj, kind.rho, rng());
      views_ptr = &views;
    }

    double loss_sum = 0.0;
    int batches = 0;
    for (std::size_t start = 0; start < order.size();
         start += (std::size_t)cfg.batch_size) {
      const auto end =
          std::min(order.size(), start + (std::size_t)cfg.batch_size);
      Batch batch;
      batch.reserve(end - start);
      for (std::size_t p = start; p < end; ++p) {
        const auto& it = train_data.interactions[order[p]];
        batch.push_back(
            {it.user, it.item, sample_negative(train_data, it.user, rng)});
      }
      double loss = 0.0;
      Gradients grads = compute_gradients(kind, params, adj_ptr, batch,
                                          cfg.objective, views_ptr, &loss);
      adam_step(params, grads, adam, cfg.lr);
      loss_sum += loss;
      ++batches;
    }

    MetricReport valid = evaluate(kind, params, adj_ptr, train_data, nullptr,
                                  valid_data, cfg.k_eval);
    result.history.epochs.push_back(
        {epoch, loss_sum / std::max(batches, 1), valid.ndcg_at_k});

    if (valid.ndcg_at_k > best_ndcg) {
      best_ndcg = valid.ndcg_at_k;
      result.history.best_epoch = epoch;
      result.params = params;
      epochs_since_improve = 0;
    } else if (++epochs_since_improve >= cfg.patience) {
      result.history.stopped_early = true;
      break;
    }
  }
  return result;
}

}  // namespace cfscale
