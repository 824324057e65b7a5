// Copyright 2026 the cfscale authors
// SPDX-License-Identifier: Apache-2.0
//
// Compares the OpenMP kernels against their serial reference on a synthetic
// bipartite graph: layer propagation and full-sort evaluation.

#include <chrono>
#include <cstdio>
#include <random>

#include "cfscale/evaluate.hpp"
#include "cfscale/spectrum.hpp"

using namespace cfscale;

namespace {

Dataset synthetic(int m, int n, int per_user, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> item(0, n - 1);
  std::vector<Interaction> inter;
  for (int u = 0; u < m; ++u)
    for (int t = 0; t < per_user; ++t) inter.push_back({u, item(rng)});
  return make_dataset(m, n, std::move(inter));
}

template <typename F>
double time_ms(F&& fn, int reps) {
  auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) fn();
  auto dt = std::chrono::steady_clock::now() - t0;
  return std::chrono::duration<double, std::milli>(dt).count() / reps;
}

}  // namespace

int main() {
  const int m = 4000, n = 6000, k = 128, layers = 3;
  Dataset d = synthetic(m, n, 40, 1);
  NormAdj adj = build_normalized_adjacency(d);
  Params params = init_params(ModelKind::lightgcn(layers), m, n, k, 1);
  Matrix e0 = params.stacked();

  std::printf("graph: %d users, %d items, %zu edges, k=%d, L=%d\n", m, n,
              adj.edges.size(), k, layers);

  Matrix serial, parallel;
  double t_serial = time_ms([&] { serial = propagate_serial(adj, e0, layers); }, 5);
  double t_parallel = time_ms([&] { parallel = propagate(adj, e0, layers); }, 5);
  double diff = (serial - parallel).cwiseAbs().maxCoeff();
  std::printf("propagate   serial %8.2f ms   openmp %8.2f ms   speedup %.2fx   max|diff| %.3g\n",
              t_serial, t_parallel, t_serial / t_parallel, diff);

  auto kind = ModelKind::lightgcn(layers);
  auto eval_once = [&] {
    return evaluate(kind, params, &adj, d, nullptr, d, 20);
  };
  double t_eval = time_ms([&] { (void)eval_once(); }, 3);
  std::printf("evaluate    openmp %8.2f ms over %d users\n", t_eval, m);

  double radius = spectral_radius_power_iteration(adj);
  std::printf("spectral radius estimate: %.6f\n", radius);
  return diff < 1e-12 ? 0 : 1;
}
