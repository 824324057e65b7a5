// Copyright 2026 the cfscale authors
// SPDX-License-Identifier: Apache-2.0

#include "cfscale/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include "cfscale/errors.hpp"

namespace cfscale {

ModelKind ModelKind::bpr() { return {}; }

ModelKind ModelKind::neumf(std::vector<int> layer_dims) {
  ModelKind k;
  k.variant = ModelVariant::NeuMf;
  k.layer_dims = std::move(layer_dims);
  return k;
}

ModelKind ModelKind::lightgcn(int layers) {
  ModelKind k;
  k.variant = ModelVariant::LightGcn;
  k.layers = layers;
  return k;
}

ModelKind ModelKind::sgl(int layers, double rho, double gamma, double tau) {
  ModelKind k;
  k.variant = ModelVariant::Sgl;
  k.layers = layers;
  k.rho = rho;
  k.gamma = gamma;
  k.tau = tau;
  return k;
}

const char* variant_name(ModelVariant v) {
  switch (v) {
    case ModelVariant::Bpr: return "bpr";
    case ModelVariant::NeuMf: return "neumf";
    case ModelVariant::LightGcn: return "lightgcn";
    case ModelVariant::Sgl: return "sgl";
  }
  return "?";
}

Matrix Params::stacked() const {
  Matrix e(m() + n(), dim());
  e.topRows(m()) = user_emb;
  e.bottomRows(n()) = item_emb;
  return e;
}

std::vector<int> default_neumf_dims(int k) {
  return {2 * k, std::max(k, 1), std::max(k / 2, 1)};
}

Params init_params(const ModelKind& kind, int m, int n, int k,
                   std::uint64_t seed) {
  if (k < 1) throw ConfigError("embedding dimension must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 0.1 / std::sqrt((double)k));
  Params p;
  p.user_emb.resize(m, k);
  p.item_emb.resize(n, k);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < k; ++c) p.user_emb(r, c) = gauss(rng);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < k; ++c) p.item_emb(r, c) = gauss(rng);

  if (kind.variant == ModelVariant::NeuMf) {
    auto dims = kind.layer_dims.empty() ? default_neumf_dims(k) : kind.layer_dims;
    if (dims.empty() || dims.front() != 2 * k)
      throw ConfigError("NeuMF layer_dims must start at 2k");
    auto xavier = [&](Eigen::Index rows, Eigen::Index cols) {
      double bound = std::sqrt(6.0 / (double)(rows + cols));
      std::uniform_real_distribution<double> uni(-bound, bound);
      Matrix w(rows, cols);
      for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) w(r, c) = uni(rng);
      return w;
    };
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
      p.mlp_weights.push_back(xavier(dims[l + 1], dims[l]));
      p.mlp_biases.push_back(Eigen::VectorXd::Zero(dims[l + 1]));
    }
    p.fusion = xavier(k + dims.back(), 1).col(0);
  }
  return p;
}

namespace {

double neumf_score(const Params& p, int user, int item) {
  const int k = p.dim();
  Eigen::VectorXd h(2 * k);
  h.head(k) = p.user_emb.row(user).transpose();
  h.tail(k) = p.item_emb.row(item).transpose();
  for (std::size_t l = 0; l < p.mlp_weights.size(); ++l)
    h = (p.mlp_weights[l] * h + p.mlp_biases[l]).cwiseMax(0.0);
  Eigen::VectorXd fused(k + h.size());
  fused.head(k) = (p.user_emb.row(user).array() * p.item_emb.row(item).array())
                      .matrix()
                      .transpose();
  fused.tail(h.size()) = h;
  return p.fusion.dot(fused);
}

}  // namespace

Matrix propagated_embeddings(const ModelKind& kind, const Params& params,
                             const NormAdj& adj) {
  return propagate(adj, params.stacked(), kind.layers);
}

double score(const ModelKind& kind, const Params& params, const NormAdj* adj,
             int user, int item) {
  switch (kind.variant) {
    case ModelVariant::Bpr:
      return params.user_emb.row(user).dot(params.item_emb.row(item));
    case ModelVariant::NeuMf:
      return neumf_score(params, user, item);
    case ModelVariant::LightGcn:
    case ModelVariant::Sgl: {
      if (!adj) throw ConfigError("graph model requires an adjacency");
      Matrix e = propagated_embeddings(kind, params, *adj);
      return e.row(user).dot(e.row(params.m() + item));
    }
  }
  throw ConfigError("unknown model variant");
}

Eigen::VectorXd score_all_items_with(const ModelKind& kind,
                                     const Params& params,
                                     const Matrix* propagated, int user) {
  const int n = params.n();
  switch (kind.variant) {
    case ModelVariant::Bpr:
      return params.item_emb * params.user_emb.row(user).transpose();
    case ModelVariant::NeuMf: {
      Eigen::VectorXd out(n);
#pragma omp parallel for schedule(static)
      for (int i = 0; i < n; ++i) out[i] = neumf_score(params, user, i);
      return out;
    }
    case ModelVariant::LightGcn:
    case ModelVariant::Sgl: {
      if (!propagated)
        throw ConfigError("graph model requires propagated embeddings");
      return propagated->bottomRows(n) *
             propagated->row(user).transpose();
    }
  }
  throw ConfigError("unknown model variant");
}

Eigen::VectorXd score_all_items(const ModelKind& kind, const Params& params,
                                const NormAdj* adj, int user) {
  if (kind.is_graph()) {
    if (!adj) throw ConfigError("graph model requires an adjacency");
    Matrix e = propagated_embeddings(kind, params, *adj);
    return score_all_items_with(kind, params, &e, user);
  }
  return score_all_items_with(kind, params, nullptr, user);
}

namespace {

constexpr std::uint32_t kMagic = 0x43465350;  // "CFSP"
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ofstream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
std::uint32_t read_u32(std::ifstream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}
void write_matrix(std::ofstream& out, const Matrix& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      double v = m(r, c);
      out.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
}
void read_matrix(std::ifstream& in, Matrix& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      double v = 0;
      in.read(reinterpret_cast<char*>(&v), sizeof(v));
      m(r, c) = v;
    }
}

}  // namespace

void save_params(const Params& params, const ModelKind& kind,
                 const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file: " + path);
  write_u32(out, kMagic);
  write_u32(out, kVersion);
  write_u32(out, (std::uint32_t)kind.variant);
  write_u32(out, (std::uint32_t)params.m());
  write_u32(out, (std::uint32_t)params.n());
  write_u32(out, (std::uint32_t)params.dim());
  std::vector<int> dims = kind.layer_dims;
  if (kind.variant == ModelVariant::NeuMf && dims.empty())
    dims = default_neumf_dims(params.dim());
  if (kind.variant != ModelVariant::NeuMf) dims.clear();
  write_u32(out, (std::uint32_t)dims.size());
  for (int d : dims) write_u32(out, (std::uint32_t)d);
  write_matrix(out, params.user_emb);
  write_matrix(out, params.item_emb);
  for (const auto& w : params.mlp_weights) write_matrix(out, w);
  for (const auto& b : params.mlp_biases) write_matrix(out, b);
  if (params.fusion.size() > 0) write_matrix(out, params.fusion);
}

std::pair<Params, ModelKind> load_params(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open params file: " + path);
  if (read_u32(in) != kMagic) throw ParseError("bad params magic in " + path);
  if (read_u32(in) != kVersion)
    throw ParseError("unsupported params version in " + path);
  ModelKind kind;
  kind.variant = (ModelVariant)read_u32(in);
  int m = (int)read_u32(in);
  int n = (int)read_u32(in);
  int k = (int)read_u32(in);
  int ndims = (int)read_u32(in);
  for (int i = 0; i < ndims; ++i) kind.layer_dims.push_back((int)read_u32(in));

  Params p;
  p.user_emb.resize(m, k);
  p.item_emb.resize(n, k);
  read_matrix(in, p.user_emb);
  read_matrix(in, p.item_emb);
  if (kind.variant == ModelVariant::NeuMf) {
    const auto& dims = kind.layer_dims;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
      Matrix w(dims[l + 1], dims[l]);
      read_matrix(in, w);
      p.mlp_weights.push_back(std::move(w));
    }
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
      Matrix b(dims[l + 1], 1);
      read_matrix(in, b);
      p.mlp_biases.push_back(b.col(0));
    }
    Matrix f(k + dims.back(), 1);
    read_matrix(in, f);
    p.fusion = f.col(0);
  }
  if (!in) throw ParseError("truncated params file: " + path);
  return {std::move(p), std::move(kind)};
}

}  // namespace cfscale
