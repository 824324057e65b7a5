// Copyright 2026 the cfscale authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cfscale/adjacency.hpp"

namespace cfscale {

enum class ModelVariant : std::uint32_t { Bpr = 0, NeuMf = 1, LightGcn = 2, Sgl = 3 };

struct ModelKind {
  ModelVariant variant = ModelVariant::Bpr;
  int layers = 1;                  // graph variants
  std::vector<int> layer_dims;     // NeuMF MLP widths incl. input (default [2k,k,k/2])
  double rho = 0.1;                // SGL edge-drop probability
  double gamma = 0.1;              // SGL contrastive weight
  double tau = 0.2;                // SGL temperature

  bool is_graph() const {
    return variant == ModelVariant::LightGcn || variant == ModelVariant::Sgl;
  }
  static ModelKind bpr();
  static ModelKind neumf(std::vector<int> layer_dims = {});
  static ModelKind lightgcn(int layers);
  static ModelKind sgl(int layers, double rho, double gamma, double tau);
};

const char* variant_name(ModelVariant v);

struct Params {
  Matrix user_emb;  // m x k
  Matrix item_emb;  // n x k
  // NeuMF only
  std::vector<Matrix> mlp_weights;           // W[l]: dims[l+1] x dims[l]
  std::vector<Eigen::VectorXd> mlp_biases;   // b[l]: dims[l+1]
  Eigen::VectorXd fusion;                    // over [p (.) q || mlp_out]

  int m() const { return (int)user_emb.rows(); }
  int n() const { return (int)item_emb.rows(); }
  int dim() const { return (int)user_emb.cols(); }
  Matrix stacked() const;  // (m+n) x k, users then items
};

std::vector<int> default_neumf_dims(int k);

// Embeddings ~ N(0, 0.01/k); NeuMF weights Xavier-uniform.
Params init_params(const ModelKind& kind, int m, int n, int k,
                   std::uint64_t seed);

double score(const ModelKind& kind, const Params& params, const NormAdj* adj,
             int user, int item);

Eigen::VectorXd score_all_items(const ModelKind& kind, const Params& params,
                                const NormAdj* adj, int user);

// Precomputed propagation for graph variants; pass to the *_with helpers when
// scoring many users against one parameter snapshot.
Matrix propagated_embeddings(const ModelKind& kind, const Params& params,
                             const NormAdj& adj);
Eigen::VectorXd score_all_items_with(const ModelKind& kind,
                                     const Params& params,
                                     const Matrix* propagated, int user);

// Flat binary format: magic, version, variant tag, m, n, k, layer_dims,
// then little-endian doubles in row-major order.
void save_params(const Params& params, const ModelKind& kind,
                 const std::string& path);
std::pair<Params, ModelKind> load_params(const std::string& path);

}  // namespace cfscale
