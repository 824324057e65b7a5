// Copyright 2026 the cfscale authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <filesystem>

#include <doctest.h>

#include "cfscale/errors.hpp"
#include "cfscale/model.hpp"
#include "test_helpers.hpp"

using namespace cfscale;
using cfscale::testing::random_dataset;

TEST_CASE("init is deterministic and shaped") {
  Params a = init_params(ModelKind::bpr(), 943, 1682, 512, 7);
  Params b = init_params(ModelKind::bpr(), 943, 1682, 512, 7);
  CHECK(a.user_emb == b.user_emb);
  CHECK(a.item_emb == b.item_emb);
  CHECK(a.user_emb.rows() == 943);
  CHECK(a.user_emb.cols() == 512);
  CHECK(a.item_emb.rows() == 1682);
  CHECK(a.item_emb.cols() == 512);
}

TEST_CASE("init variance is close to 0.01/k") {
  const int k = 16;
  Params p = init_params(ModelKind::bpr(), 5000, 1250, k, 3);  // 1e5 entries
  double mean = p.user_emb.mean();
  double var = (p.user_emb.array() - mean).square().mean();
  CHECK(var == doctest::Approx(0.01 / k).epsilon(0.10));
}

TEST_CASE("BPR score is the inner product") {
  Params p = init_params(ModelKind::bpr(), 1, 1, 2, 0);
  p.user_emb << 1.0, 2.0;
  p.item_emb << 3.0, 4.0;
  CHECK(score(ModelKind::bpr(), p, nullptr, 0, 0) == doctest::Approx(11.0));
}

TEST_CASE("LightGCN with L=0 degenerates to BPR scoring") {
  Dataset d = random_dataset(5, 6, 3, 1);
  NormAdj adj = build_normalized_adjacency(d);
  Params p = init_params(ModelKind::bpr(), 5, 6, 4, 2);
  auto lg = ModelKind::lightgcn(0);
  for (int u = 0; u < 5; ++u)
    for (int i = 0; i < 6; ++i)
      CHECK(score(lg, p, &adj, u, i) ==
            doctest::Approx(score(ModelKind::bpr(), p, nullptr, u, i)));
}

TEST_CASE("NeuMF with zero MLP and identity GMF fusion equals the dot product") {
  auto kind = ModelKind::neumf();
  Params p = init_params(kind, 3, 3, 4, 5);
  for (auto& w : p.mlp_weights) w.setZero();
  for (auto& b : p.mlp_biases) b.setZero();
  p.fusion.setZero();
  p.fusion.head(4).setOnes();
  for (int u = 0; u < 3; ++u)
    for (int i = 0; i < 3; ++i)
      CHECK(score(kind, p, nullptr, u, i) ==
            doctest::Approx(p.user_emb.row(u).dot(p.item_emb.row(i))));
}

TEST_CASE("graph scoring requires an adjacency") {
  Params p = init_params(ModelKind::lightgcn(2), 2, 2, 4, 0);
  CHECK_THROWS_AS(score(ModelKind::lightgcn(2), p, nullptr, 0, 0), ConfigError);
}

TEST_CASE("score_all_items matches per-item scores") {
  Dataset d = random_dataset(4, 6, 3, 9);
  NormAdj adj = build_normalized_adjacency(d);
  for (auto kind : {ModelKind::bpr(), ModelKind::neumf(),
                    ModelKind::lightgcn(2), ModelKind::sgl(2, 0.1, 0.1, 0.2)}) {
    Params p = init_params(kind, 4, 6, 4, 11);
    Eigen::VectorXd all = score_all_items(kind, p, &adj, 2);
    for (int i = 0; i < 6; ++i)
      CHECK(all[i] == doctest::Approx(score(kind, p, &adj, 2, i)).epsilon(1e-10));
  }
}

TEST_CASE("BPR score_all_items equals the matrix-vector product") {
  Params p = init_params(ModelKind::bpr(), 3, 7, 5, 13);
  Eigen::VectorXd all = score_all_items(ModelKind::bpr(), p, nullptr, 1);
  Eigen::VectorXd mv = p.item_emb * p.user_emb.row(1).transpose();
  CHECK((all - mv).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("SGL scores identically to LightGCN") {
  Dataset d = random_dataset(5, 5, 2, 17);
  NormAdj adj = build_normalized_adjacency(d);
  Params p = init_params(ModelKind::bpr(), 5, 5, 4, 19);
  auto lg = ModelKind::lightgcn(2);
  auto sg = ModelKind::sgl(2, 0.2, 0.5, 0.1);
  for (int u = 0; u < 5; ++u)
    CHECK((score_all_items(lg, p, &adj, u) - score_all_items(sg, p, &adj, u))
              .cwiseAbs()
              .maxCoeff() == 0.0);
}

TEST_CASE("params round-trip through the binary format") {
  auto path = (std::filesystem::temp_directory_path() / "cfscale_params.bin").string();
  for (auto kind : {ModelKind::bpr(), ModelKind::neumf()}) {
    Params p = init_params(kind, 4, 5, 6, 21);
    save_params(p, kind, path);
    auto [loaded, loaded_kind] = load_params(path);
    CHECK(loaded_kind.variant == kind.variant);
    CHECK(loaded.user_emb == p.user_emb);
    CHECK(loaded.item_emb == p.item_emb);
    REQUIRE(loaded.mlp_weights.size() == p.mlp_weights.size());
    for (std::size_t l = 0; l < p.mlp_weights.size(); ++l) {
      CHECK(loaded.mlp_weights[l] == p.mlp_weights[l]);
      CHECK(loaded.mlp_biases[l] == p.mlp_biases[l]);
    }
    if (p.fusion.size() > 0) CHECK(loaded.fusion == p.fusion);
  }
}
