// Copyright 2026 the cfscale authors
// SPDX-License-Identifier: Apache-2.0

#include "cfscale/adjacency.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "cfscale/errors.hpp"

namespace cfscale {

namespace {

NormAdj build_from_edges(int m, int n, std::vector<Interaction> edges) {
  NormAdj adj;
  adj.m = m;
  adj.n = n;
  const int size = m + n;
  adj.degree.assign(size, 0);
  for (const auto& e : edges) {
    ++adj.degree[e.user];
    ++adj.degree[m + e.item];
  }
  // directed entry list: user->item and item->user
  std::vector<std::pair<int, int>> dir;
  dir.reserve(2 * edges.size());
  for (const auto& e : edges) {
    dir.emplace_back(e.user, m + e.item);
    dir.emplace_back(m + e.item, e.user);
  }
  std::sort(dir.begin(), dir.end());
  adj.row_ptr.assign(size + 1, 0);
  adj.col_idx.reserve(dir.size());
  adj.weight.reserve(dir.size());
  for (const auto& [r, c] : dir) ++adj.row_ptr[r + 1];
  for (int i = 0; i < size; ++i) adj.row_ptr[i + 1] += adj.row_ptr[i];
  for (const auto& [r, c] : dir) {
    adj.col_idx.push_back(c);
    adj.weight.push_back(1.0 /
                         std::sqrt((double)adj.degree[r] * adj.degree[c]));
  }
  std::sort(edges.begin(), edges.end());
  adj.edges = std::move(edges);
  return adj;
}

}  // namespace

Matrix NormAdj::dense() const {
  Matrix a = Matrix::Zero(size(), size());
  for (int r = 0; r < size(); ++r)
    for (int p = row_ptr[r]; p < row_ptr[r + 1]; ++p)
      a(r, col_idx[p]) = weight[p];
  return a;
}

NormAdj build_normalized_adjacency(const Dataset& train) {
  return build_from_edges(train.m, train.n, train.interactions);
}

NormAdj edge_dropout(const NormAdj& adj, const AugmentSpec& spec) {
  if (spec.rho < 0.0 || spec.rho >= 1.0)
    throw ConfigError("dropout rho must lie in [0,1)");
  if (spec.rho == 0.0) return adj;
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<Interaction> kept;
  kept.reserve(adj.edges.size());
  for (const auto& e : adj.edges)
    if (coin(rng) >= spec.rho) kept.push_back(e);
  return build_from_edges(adj.m, adj.n, std::move(kept));
}

Matrix feature_mask(const Matrix& features, const AugmentSpec& spec) {
  if (spec.rho < 0.0 || spec.rho >= 1.0)
    throw ConfigError("mask rho must lie in [0,1)");
  if (spec.rho == 0.0) return features;
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  Matrix out = features;
  for (Eigen::Index r = 0; r < out.rows(); ++r)
    for (Eigen::Index c = 0; c < out.cols(); ++c)
      if (coin(rng) < spec.rho) out(r, c) = 0.0;
  return out;
}

namespace {

// One sparse multiply y = A*x. Row-parallel: each output row is reduced in
// CSR column order, so results are deterministic regardless of thread count.
Matrix spmm(const NormAdj& adj, const Matrix& x, bool parallel) {
  Matrix y = Matrix::Zero(x.rows(), x.cols());
#pragma omp parallel for schedule(static) if (parallel)
  for (int r = 0; r < adj.size(); ++r) {
    for (int p = adj.row_ptr[r]; p < adj.row_ptr[r + 1]; ++p)
      y.row(r) += adj.weight[p] * x.row(adj.col_idx[p]);
  }
  return y;
}

Matrix propagate_impl(const NormAdj& adj, const Matrix& x0, int layers,
                      bool parallel) {
  if ((int)x0.rows() != adj.size())
    throw ShapeError("propagate: embedding rows must equal m+n");
  if (layers < 0) throw ConfigError("layer count must be >= 0");
  Matrix acc = x0;
  Matrix cur = x0;
  for (int l = 1; l <= layers; ++l) {
    cur = spmm(adj, cur, parallel);
    acc += cur;
  }
  return acc / (double)(layers + 1);
}

}  // namespace

Matrix propagate(const NormAdj& adj, const Matrix& x0, int layers) {
  return propagate_impl(adj, x0, layers, true);
}

Matrix propagate_serial(const NormAdj& adj, const Matrix& x0, int layers) {
  return propagate_impl(adj, x0, layers, false);
}

void export_coordinate(const NormAdj& adj, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open output file: " + path);
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  std::size_t nnz = 0;
  for (int r = 0; r < adj.size(); ++r)
    for (int p = adj.row_ptr[r]; p < adj.row_ptr[r + 1]; ++p)
      if (adj.col_idx[p] <= r) ++nnz;
  out << adj.size() << " " << adj.size() << " " << nnz << "\n";
  out.precision(17);
  for (int r = 0; r < adj.size(); ++r)
    for (int p = adj.row_ptr[r]; p < adj.row_ptr[r + 1]; ++p)
      if (adj.col_idx[p] <= r)
        out << r + 1 << " " << adj.col_idx[p] + 1 << " " << adj.weight[p]
            << "\n";
}

}  // namespace cfscale
