// Copyright 2026 the cfscale authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "cfscale/dataset.hpp"
#include "cfscale/model.hpp"

namespace cfscale {

struct MetricReport {
  double ndcg_at_k = 0.0;
  int k = 0;
  int users_evaluated = 0;
  std::string csv_row() const;  // "k,ndcg,users"
};

// Binary-relevance NDCG of an ordered ranking against a sorted relevant set.
double ndcg_at_k(const std::vector<int>& ranking,
                 const std::vector<int>& relevant, int k);

// Full-sort evaluation: per test user, score all items, mask train+valid
// positives to -inf, rank by (score desc, item asc), average NDCG@k. Users
// without test positives are excluded.
MetricReport evaluate(const ModelKind& kind, const Params& params,
                      const NormAdj* adj, const Dataset& train,
                      const Dataset* valid, const Dataset& test, int k);

}  // namespace cfscale
