// Copyright 2026 the cfscale authors
// SPDX-License-Identifier: Apache-2.0

#include "cfscale/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "cfscale/errors.hpp"

namespace cfscale {

bool Dataset::has_positive(int user, int item) const {
  const auto& pos = user_pos[user];
  return std::binary_search(pos.begin(), pos.end(), item);
}

Dataset make_dataset(int m, int n, std::vector<Interaction> interactions) {
  for (const auto& it : interactions) {
    if (it.user < 0 || it.user >= m || it.item < 0 || it.item >= n)
      throw ConfigError("interaction index out of bounds");
  }
  std::sort(interactions.begin(), interactions.end());
  interactions.erase(std::unique(interactions.begin(), interactions.end()),
                     interactions.end());
  Dataset d;
  d.m = m;
  d.n = n;
  d.interactions = std::move(interactions);
  d.user_pos.assign(m, {});
  for (const auto& it : d.interactions) d.user_pos[it.user].push_back(it.item);
  // interactions are sorted, so each user_pos list is already sorted
  return d;
}

Dataset load_interactions(const std::string& path, FileFormat format) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);

  std::unordered_map<long long, int> user_ids, item_ids;
  std::vector<Interaction> interactions;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::istringstream ss(line);
    long long raw_u, raw_i;
    if (!(ss >> raw_u >> raw_i))
      throw ParseError("malformed line " + std::to_string(line_no) + " in " +
                       path);
    if (format == FileFormat::TsvUirt) {
      double rating;
      long long ts;
      if (!(ss >> rating >> ts))
        throw ParseError("malformed line " + std::to_string(line_no) + " in " +
                         path + " (expected `user item rating timestamp`)");
    }
    auto [uit, unew] = user_ids.try_emplace(raw_u, (int)user_ids.size());
    auto [iit, inew] = item_ids.try_emplace(raw_i, (int)item_ids.size());
    interactions.push_back({uit->second, iit->second});
  }
  if (interactions.empty()) throw ParseError("empty dataset: " + path);
  return make_dataset((int)user_ids.size(), (int)item_ids.size(),
                      std::move(interactions));
}

std::string DatasetStats::csv_row() const {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%d,%d,%zu,%.6f", m, n, count, sparsity);
  return buf;
}

DatasetStats stats(const Dataset& d) {
  if (d.m <= 0 || d.n <= 0) throw ConfigError("stats requires m>0 and n>0");
  DatasetStats s;
  s.m = d.m;
  s.n = d.n;
  s.count = d.count();
  s.sparsity = 1.0 - (double)s.count / ((double)d.m * (double)d.n);
  return s;
}

SplitResult split(const Dataset& d, const SplitSpec& s) {
  const double sum = s.ratios[0] + s.ratios[1] + s.ratios[2];
  if (std::abs(sum - 1.0) > 1e-12 || s.ratios[0] < 0 || s.ratios[1] < 0 ||
      s.ratios[2] < 0)
    throw ConfigError("split ratios must be non-negative and sum to 1");
  if (d.interactions.empty()) throw ConfigError("cannot split empty dataset");

  const std::size_t total = d.count();
  const auto n_valid = (std::size_t)std::floor(s.ratios[1] * (double)total);
  const auto n_test = (std::size_t)std::floor(s.ratios[2] * (double)total);
  const std::size_t n_train = total - n_valid - n_test;

  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(s.seed);
  std::shuffle(order.begin(), order.end(), rng);

  // assignment[idx]: 0=train, 1=valid, 2=test
  std::vector<int> assignment(total);
  for (std::size_t p = 0; p < total; ++p)
    assignment[order[p]] = p < n_train ? 0 : (p < n_train + n_valid ? 1 : 2);

  // Guarantee train coverage for users with >=3 interactions by swapping one
  // of their held-out interactions with a train interaction of a user that
  // keeps >=1 afterwards. Sizes are preserved.
  std::vector<int> train_count(d.m, 0);
  for (std::size_t idx = 0; idx < total; ++idx)
    if (assignment[idx] == 0) ++train_count[d.interactions[idx].user];
  for (int u = 0; u < d.m; ++u) {
    if (d.user_pos[u].size() < 3 || train_count[u] > 0) continue;
    std::size_t held = total;  // some held-out interaction of u
    for (std::size_t idx = 0; idx < total && held == total; ++idx)
      if (assignment[idx] != 0 && d.interactions[idx].user == u) held = idx;
    std::size_t donor = total;  // train interaction of a user keeping >=1
    for (std::size_t idx = 0; idx < total && donor == total; ++idx)
      if (assignment[idx] == 0 &&
          train_count[d.interactions[idx].user] >= 2)
        donor = idx;
    if (held == total || donor == total) continue;
    std::swap(assignment[held], assignment[donor]);
    ++train_count[u];
    --train_count[d.interactions[donor].user];
  }

  std::vector<Interaction> parts[3];
  for (std::size_t idx = 0; idx < total; ++idx)
    parts[assignment[idx]].push_back(d.interactions[idx]);
  return {make_dataset(d.m, d.n, std::move(parts[0])),
          make_dataset(d.m, d.n, std::move(parts[1])),
          make_dataset(d.m, d.n, std::move(parts[2]))};
}

Dataset inject_noise(const Dataset& train, const NoiseSpec& spec) {
  if (spec.delta < 0.0 || spec.delta >= 1.0)
    throw ConfigError("noise delta must lie in [0,1)");
  const auto to_add = (std::size_t)std::floor(
      spec.delta * (double)train.count() / (1.0 - spec.delta));
  if (to_add == 0) return train;

  const std::size_t universe = (std::size_t)train.m * (std::size_t)train.n;
  const std::size_t unobserved = universe - train.count();
  if (to_add > unobserved)
    throw CapacityError("not enough unobserved pairs to inject noise");

  std::mt19937_64 rng(spec.seed);
  std::vector<Interaction> added;
  std::unordered_set<std::size_t> taken;
  if (unobserved < 2 * to_add || universe < (std::size_t)1 << 24) {
    // dense regime: enumerate the complement and sample without replacement
    std::vector<std::size_t> complement;
    complement.reserve(unobserved);
    for (int u = 0; u < train.m; ++u)
      for (int i = 0; i < train.n; ++i)
        if (!train.has_positive(u, i))
          complement.push_back((std::size_t)u * train.n + i);
    std::shuffle(complement.begin(), complement.end(), rng);
    for (std::size_t p = 0; p < to_add; ++p) {
      auto code = complement[p];
      added.push_back({(int)(code / train.n), (int)(code % train.n)});
    }
  } else {
    std::uniform_int_distribution<std::size_t> dist(0, universe - 1);
    while (added.size() < to_add) {
      auto code = dist(rng);
      int u = (int)(code / train.n), i = (int)(code % train.n);
      if (train.has_positive(u, i) || !taken.insert(code).second) continue;
      added.push_back({u, i});
    }
  }
  std::vector<Interaction> merged = train.interactions;
  merged.insert(merged.end(), added.begin(), added.end());
  return make_dataset(train.m, train.n, std::move(merged));
}

int sample_negative(const Dataset& train, int user, std::mt19937_64& rng) {
  const auto& pos = train.user_pos[user];
  if ((int)pos.size() >= train.n)
    throw CapacityError("user " + std::to_string(user) +
                        " interacted with every item; no negative exists");
  std::uniform_int_distribution<int> dist(0, train.n - 1);
  for (int attempt = 0; attempt < 100; ++attempt) {
    int item = dist(rng);
    if (!std::binary_search(pos.begin(), pos.end(), item)) return item;
  }
  // fallback: uniform pick from the explicit complement
  std::vector<int> complement;
  complement.reserve(train.n - pos.size());
  for (int i = 0; i < train.n; ++i)
    if (!std::binary_search(pos.begin(), pos.end(), i)) complement.push_back(i);
  std::uniform_int_distribution<std::size_t> pick(0, complement.size() - 1);
  return complement[pick(rng)];
}

}  // namespace cfscale
