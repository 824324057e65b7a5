// Copyright 2026 the cfscale authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "cfscale/adam.hpp"
#include "cfscale/evaluate.hpp"

namespace cfscale {

struct TrainConfig {
  int dim = 64;  // embedding dimension k
  double lr = 0.001;
  int batch_size = 2048;
  int max_epochs = 300;
  int patience = 10;
  std::uint64_t seed = 0;
  int k_eval = 20;
  ObjectiveConfig objective;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double valid_ndcg = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  bool stopped_early = false;
  void export_csv(const std::string& path) const;  // epoch,train_loss,valid_ndcg
};

struct TrainResult {
  Params params;  // snapshot from best_epoch
  TrainHistory history;
};

// Mini-batch Adam with per-epoch validation NDCG@k_eval and early stopping
// after `patience` epochs without improvement.
TrainResult train(const ModelKind& kind, const Dataset& train_data,
                  const Dataset& valid_data, const TrainConfig& cfg);

}  // namespace cfscale
