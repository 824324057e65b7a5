// Copyright 2026 the cfscale authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cfscale/dataset.hpp"

namespace cfscale {

using Matrix = Eigen::MatrixXd;

/// Symmetric degree-normalized bipartite adjacency in CSR form.
/// Nodes 0..m-1 are users, m..m+n-1 are items. Immutable and shareable.
struct NormAdj {
  int m = 0;
  int n = 0;
  std::vector<int> row_ptr;      // size m+n+1
  std::vector<int> col_idx;
  std::vector<double> weight;    // 1/sqrt(deg_r * deg_c)
  std::vector<int> degree;       // per-node neighbor count
  std::vector<Interaction> edges;  // surviving (user,item) edges

  int size() const { return m + n; }
  Matrix dense() const;
};

// Isolated nodes keep zero rows.
NormAdj build_normalized_adjacency(const Dataset& train);

struct AugmentSpec {
  enum class Kind { EdgeDropout, FeatureMask };
  Kind kind = Kind::EdgeDropout;
  double rho = 0.0;  // drop probability in [0,1)
  std::uint64_t seed = 0;
};

// Each undirected edge kept independently with probability 1-rho; weights
// renormalized from the surviving degrees.
NormAdj edge_dropout(const NormAdj& adj, const AugmentSpec& spec);

// Each coordinate zeroed independently with probability rho.
Matrix feature_mask(const Matrix& features, const AugmentSpec& spec);

// Layer-averaged propagation: (1/(L+1)) * sum_{l=0..L} A^l X.
Matrix propagate(const NormAdj& adj, const Matrix& x0, int layers);
// Serial reference, kept for testing the parallel kernel.
Matrix propagate_serial(const NormAdj& adj, const Matrix& x0, int layers);

// Matrix-Market-style coordinate text (1-based indices).
void export_coordinate(const NormAdj& adj, const std::string& path);

}  // namespace cfscale
