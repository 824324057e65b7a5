// Copyright 2026 the cfscale authors
// SPDX-License-Identifier: Apache-2.0

#include "cfscale/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cfscale/errors.hpp"

namespace cfscale {

std::string MetricReport::csv_row() const {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%d,%.6f,%d", k, ndcg_at_k, users_evaluated);
  return buf;
}

double ndcg_at_k(const std::vector<int>& ranking,
                 const std::vector<int>& relevant, int k) {
  if (k < 1) throw ConfigError("k must be >= 1");
  if (relevant.empty())
    throw ConfigError("ndcg undefined for an empty relevant set");
  double dcg = 0.0;
  const int cutoff = std::min<int>(k, (int)ranking.size());
  for (int pos = 0; pos < cutoff; ++pos)
    if (std::binary_search(relevant.begin(), relevant.end(), ranking[pos]))
      dcg += 1.0 / std::log2((double)pos + 2.0);
  double idcg = 0.0;
  const int ideal = std::min<int>(k, (int)relevant.size());
  for (int pos = 0; pos < ideal; ++pos) idcg += 1.0 / std::log2((double)pos + 2.0);
  return dcg / idcg;
}

MetricReport evaluate(const ModelKind& kind, const Params& params,
                      const NormAdj* adj, const Dataset& train,
                      const Dataset* valid, const Dataset& test, int k) {
  Matrix propagated;
  const Matrix* prop_ptr = nullptr;
  if (kind.is_graph()) {
    if (!adj) throw ConfigError("graph model requires an adjacency");
    propagated = propagated_embeddings(kind, params, *adj);
    prop_ptr = &propagated;
  }

  std::vector<int> eval_users;
  for (int u = 0; u < test.m; ++u)
    if (!test.user_pos[u].empty()) eval_users.push_back(u);

  std::vector<double> per_user(eval_users.size(), 0.0);
#pragma omp parallel for schedule(dynamic, 8)
  for (int idx = 0; idx < (int)eval_users.size(); ++idx) {
    const int u = eval_users[idx];
    Eigen::VectorXd scores = score_all_items_with(kind, params, prop_ptr, u);
    for (int i : train.user_pos[u])
      scores[i] = -std::numeric_limits<double>::infinity();
    if (valid)
      for (int i : valid->user_pos[u])
        scores[i] = -std::numeric_limits<double>::infinity();

    std::vector<int> ranking((std::size_t)params.n());
    std::iota(ranking.begin(), ranking.end(), 0);
    std::sort(ranking.begin(), ranking.end(), [&](int a, int b) {
      if (scores[a] != scores[b]) return scores[a] > scores[b];
      return a < b;
    });
    per_user[idx] = ndcg_at_k(ranking, test.user_pos[u], k);
  }

  MetricReport r;
  r.k = k;
  r.users_evaluated = (int)eval_users.size();
  // accumulate in user-index order for determinism
  double sum = 0.0;
  for (double v : per_user) sum += v;
  r.ndcg_at_k = eval_users.empty() ? 0.0 : sum / (double)eval_users.size();
  return r;
}

}  // namespace cfscale
