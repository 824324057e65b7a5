// Copyright 2026 the cfscale authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace cfscale {

struct Interaction {
  int user = 0;
  int item = 0;
  friend bool operator==(const Interaction&, const Interaction&) = default;
  friend auto operator<=>(const Interaction&, const Interaction&) = default;
};

/// Immutable after construction; safe to share across threads.
struct Dataset {
  int m = 0;  // user count
  int n = 0;  // item count
  std::vector<Interaction> interactions;       // sorted, unique
  std::vector<std::vector<int>> user_pos;      // per-user sorted positive items

  std::size_t count() const { return interactions.size(); }
  bool has_positive(int user, int item) const;
};

/// Builds user_pos and sorts/uniques the interaction list; validates bounds.
Dataset make_dataset(int m, int n, std::vector<Interaction> interactions);

enum class FileFormat { TsvUi, TsvUirt };

// `user item` or `user item rating timestamp`, whitespace separated.
// Raw ids are remapped to dense 0-based indices in first-appearance order;
// duplicate pairs collapse to one interaction.
Dataset load_interactions(const std::string& path, FileFormat format);

struct DatasetStats {
  int m = 0;
  int n = 0;
  std::size_t count = 0;
  double sparsity = 0.0;
  std::string csv_row() const;  // "m,n,count,sparsity"
};

DatasetStats stats(const Dataset& d);

struct SplitSpec {
  double ratios[3] = {0.8, 0.1, 0.1};  // train, valid, test
  std::uint64_t seed = 0;
};

struct SplitResult {
  Dataset train, valid, test;
};

// Seeded global shuffle. Valid/test get floor(ratio*N) interactions each,
// remainder goes to train. Users with >=3 interactions are guaranteed at
// least one training interaction (size-preserving swaps).
SplitResult split(const Dataset& d, const SplitSpec& s);

struct NoiseSpec {
  double delta = 0.0;  // noise ratio in [0,1)
  std::uint64_t seed = 0;
};

// Adds floor(delta*|train|/(1-delta)) interactions drawn uniformly without
// replacement from unobserved pairs, so the injected fraction of the result
// equals delta within one interaction.
Dataset inject_noise(const Dataset& train, const NoiseSpec& spec);

// Uniform draw from {0..n-1} \ user_pos[user]. Rejection sampling capped at
// 100 attempts, then a uniform pick from the explicit complement.
int sample_negative(const Dataset& train, int user, std::mt19937_64& rng);

}  // namespace cfscale
