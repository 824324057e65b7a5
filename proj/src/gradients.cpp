// Copyright 2026 the cfscale authors
// SPDX-License-Identifier: Apache-2.0

#include "cfscale/gradients.hpp"

#include <algorithm>
#include <cmath>

#include "cfscale/errors.hpp"

namespace cfscale {

Gradients zero_gradients(const Params& params) {
  Gradients g;
  g.user_emb = Matrix::Zero(params.m(), params.dim());
  g.item_emb = Matrix::Zero(params.n(), params.dim());
  for (const auto& w : params.mlp_weights)
    g.mlp_weights.push_back(Matrix::Zero(w.rows(), w.cols()));
  for (const auto& b : params.mlp_biases)
    g.mlp_biases.push_back(Eigen::VectorXd::Zero(b.size()));
  if (params.fusion.size() > 0)
    g.fusion = Eigen::VectorXd::Zero(params.fusion.size());
  return g;
}

namespace {

struct PairCache {
  Eigen::VectorXd input;                 // [p_u ; q_i]
  std::vector<Eigen::VectorXd> pre;      // pre-activation per MLP layer
  std::vector<Eigen::VectorXd> act;      // post-ReLU per MLP layer
  Eigen::VectorXd fused;                 // [p (.) q ; mlp_out]
};

double neumf_forward(const Params& p, int user, int item, PairCache& cache) {
  const int k = p.dim();
  cache.input.resize(2 * k);
  cache.input.head(k) = p.user_emb.row(user).transpose();
  cache.input.tail(k) = p.item_emb.row(item).transpose();
  cache.pre.clear();
  cache.act.clear();
  Eigen::VectorXd h = cache.input;
  for (std::size_t l = 0; l < p.mlp_weights.size(); ++l) {
    cache.pre.push_back(p.mlp_weights[l] * h + p.mlp_biases[l]);
    cache.act.push_back(cache.pre.back().cwiseMax(0.0));
    h = cache.act.back();
  }
  cache.fused.resize(k + h.size());
  cache.fused.head(k) =
      (p.user_emb.row(user).array() * p.item_emb.row(item).array())
          .matrix()
          .transpose();
  cache.fused.tail(h.size()) = h;
  return p.fusion.dot(cache.fused);
}

void neumf_backward(const Params& p, int user, int item,
                    const PairCache& cache, double scale, Gradients& g) {
  const int k = p.dim();
  g.fusion += scale * cache.fused;
  Eigen::VectorXd dfused = scale * p.fusion;
  // GMF branch
  g.user_emb.row(user) +=
      (dfused.head(k).array() * p.item_emb.row(item).transpose().array())
          .matrix()
          .transpose();
  g.item_emb.row(item) +=
      (dfused.head(k).array() * p.user_emb.row(user).transpose().array())
          .matrix()
          .transpose();
  // MLP branch
  Eigen::VectorXd dh = dfused.tail(dfused.size() - k);
  for (int l = (int)p.mlp_weights.size() - 1; l >= 0; --l) {
    Eigen::VectorXd dz =
        (cache.pre[l].array() > 0.0).select(dh.array(), 0.0).matrix();
    const Eigen::VectorXd& in = l == 0 ? cache.input : cache.act[l - 1];
    g.mlp_weights[l] += dz * in.transpose();
    g.mlp_biases[l] += dz;
    dh = p.mlp_weights[l].transpose() * dz;
  }
  g.user_emb.row(user) += dh.head(k).transpose();
  g.item_emb.row(item) += dh.tail(k).transpose();
}

// dL/ds per sample for the (possibly dropped) mean BPR loss. Dropped samples
// get exactly zero weight.
Eigen::VectorXd bpr_score_grads(const Eigen::VectorXd& pos,
                                const Eigen::VectorXd& neg,
                                const DropConfig& cfg, bool with_drop,
                                double* loss_out) {
  Eigen::VectorXd losses = per_sample_bpr_losses(pos, neg, cfg.gamma_eps);
  std::vector<int> kept;
  if (with_drop) {
    kept = drop_selection(losses, cfg);
  } else {
    kept.resize(losses.size());
    for (int i = 0; i < (int)losses.size(); ++i) kept[i] = i;
  }
  if (loss_out) {
    double sum = 0.0;
    for (int i : kept) sum += losses[i];
    *loss_out = sum / (double)kept.size();
  }
  Eigen::VectorXd ds = Eigen::VectorXd::Zero(pos.size());
  for (int t : kept) {
    double sig = 1.0 / (1.0 + std::exp(-(pos[t] - neg[t])));
    ds[t] = -sig * (1.0 - sig) / (cfg.gamma_eps + sig) / (double)kept.size();
  }
  return ds;
}

std::pair<std::vector<int>, std::vector<int>> batch_nodes(const Batch& batch,
                                                          int m) {
  std::vector<int> users, items;
  for (const auto& t : batch) {
    users.push_back(t.user);
    items.push_back(m + t.pos_item);
  }
  auto uniq = [](std::vector<int>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  uniq(users);
  uniq(items);
  return {users, items};
}

Matrix gather_rows(const Matrix& src, const std::vector<int>& rows) {
  Matrix out((int)rows.size(), src.cols());
  for (int r = 0; r < (int)rows.size(); ++r) out.row(r) = src.row(rows[r]);
  return out;
}

// InfoNCE over cosine similarity with gradients into the gathered rows.
double contrastive_backward(const Matrix& a, const Matrix& b, double tau,
                            Matrix& da, Matrix& db) {
  const int bn = (int)a.rows();
  Eigen::VectorXd na(bn), nb(bn);
  for (int r = 0; r < bn; ++r) {
    na[r] = a.row(r).norm();
    nb[r] = b.row(r).norm();
    if (na[r] == 0.0 || nb[r] == 0.0)
      throw NumericError("degenerate zero-norm embedding row");
  }
  Matrix cosm(bn, bn);
  for (int u = 0; u < bn; ++u)
    for (int v = 0; v < bn; ++v)
      cosm(u, v) = a.row(u).dot(b.row(v)) / (na[u] * nb[v]);

  da = Matrix::Zero(bn, a.cols());
  db = Matrix::Zero(bn, a.cols());
  double total = 0.0;
  for (int u = 0; u < bn; ++u) {
    Eigen::VectorXd s = cosm.row(u).transpose() / tau;
    double mx = s.maxCoeff();
    Eigen::VectorXd ex = (s.array() - mx).exp();
    double z = ex.sum();
    total += -(s[u] - (mx + std::log(z)));
    for (int v = 0; v < bn; ++v) {
      double dc = (ex[v] / z - (v == u ? 1.0 : 0.0)) / ((double)bn * tau);
      if (dc == 0.0) continue;
      da.row(u) +=
          dc * (b.row(v) / (na[u] * nb[v]) - cosm(u, v) * a.row(u) / (na[u] * na[u]));
      db.row(v) +=
          dc * (a.row(u) / (na[u] * nb[v]) - cosm(u, v) * b.row(v) / (nb[v] * nb[v]));
    }
  }
  return total / (double)bn;
}

void check_finite(const Matrix& m, const char* what) {
  if (!m.allFinite())
    throw NumericError(std::string("non-finite gradient in ") + what);
}

}  // namespace

double objective_loss(const ModelKind& kind, const Params& params,
                      const NormAdj* adj, const Batch& batch,
                      const ObjectiveConfig& cfg, const SglViews* views) {
  if (batch.empty()) throw ConfigError("empty batch");
  if (cfg.kind == ObjectiveKind::SglComposite) {
    if (kind.variant != ModelVariant::Sgl)
      throw ConfigError("sgl objective requires the SGL model");
    if (!adj || !views) throw ConfigError("sgl objective requires adjacency and views");
    return sgl_total_loss(batch, params, *adj, *views, kind,
                          cfg.sgl_item_term);
  }
  Eigen::VectorXd pos((int)batch.size()), neg((int)batch.size());
  if (kind.is_graph()) {
    if (!adj) throw ConfigError("graph model requires an adjacency");
    Matrix main = propagate(*adj, params.stacked(), kind.layers);
    for (int t = 0; t < (int)batch.size(); ++t) {
      pos[t] = main.row(batch[t].user)
                   .dot(main.row(params.m() + batch[t].pos_item));
      neg[t] = main.row(batch[t].user)
                   .dot(main.row(params.m() + batch[t].neg_item));
    }
  } else {
    PairCache cache;
    for (int t = 0; t < (int)batch.size(); ++t) {
      if (kind.variant == ModelVariant::NeuMf) {
        pos[t] = neumf_forward(params, batch[t].user, batch[t].pos_item, cache);
        neg[t] = neumf_forward(params, batch[t].user, batch[t].neg_item, cache);
      } else {
        pos[t] = params.user_emb.row(batch[t].user)
                     .dot(params.item_emb.row(batch[t].pos_item));
        neg[t] = params.user_emb.row(batch[t].user)
                     .dot(params.item_emb.row(batch[t].neg_item));
      }
    }
  }
  return cfg.kind == ObjectiveKind::BprDrop ? bpr_drop_loss(pos, neg, cfg.drop)
                                            : bpr_loss(pos, neg);
}

Gradients compute_gradients(const ModelKind& kind, const Params& params,
                            const NormAdj* adj, const Batch& batch,
                            const ObjectiveConfig& cfg, const SglViews* views,
                            double* loss_out) {
  if (batch.empty()) throw ConfigError("empty batch");
  Gradients g = zero_gradients(params);
  const int m = params.m();
  const bool with_drop = cfg.kind == ObjectiveKind::BprDrop;
  double loss = 0.0;

  if (kind.variant == ModelVariant::Bpr ||
      kind.variant == ModelVariant::NeuMf) {
    Eigen::VectorXd pos((int)batch.size()), neg((int)batch.size());
    std::vector<PairCache> pos_cache, neg_cache;
    if (kind.variant == ModelVariant::NeuMf) {
      pos_cache.resize(batch.size());
      neg_cache.resize(batch.size());
    }
    for (int t = 0; t < (int)batch.size(); ++t) {
      const auto& tr = batch[t];
      if (kind.variant == ModelVariant::NeuMf) {
        pos[t] = neumf_forward(params, tr.user, tr.pos_item, pos_cache[t]);
        neg[t] = neumf_forward(params, tr.user, tr.neg_item, neg_cache[t]);
      } else {
        pos[t] = params.user_emb.row(tr.user).dot(params.item_emb.row(tr.pos_item));
        neg[t] = params.user_emb.row(tr.user).dot(params.item_emb.row(tr.neg_item));
      }
    }
    Eigen::VectorXd ds = bpr_score_grads(pos, neg, cfg.drop, with_drop, &loss);
    for (int t = 0; t < (int)batch.size(); ++t) {
      if (ds[t] == 0.0) continue;
      const auto& tr = batch[t];
      if (kind.variant == ModelVariant::NeuMf) {
        neumf_backward(params, tr.user, tr.pos_item, pos_cache[t], ds[t], g);
        neumf_backward(params, tr.user, tr.neg_item, neg_cache[t], -ds[t], g);
      } else {
        g.user_emb.row(tr.user) +=
            ds[t] * (params.item_emb.row(tr.pos_item) -
                     params.item_emb.row(tr.neg_item));
        g.item_emb.row(tr.pos_item) += ds[t] * params.user_emb.row(tr.user);
        g.item_emb.row(tr.neg_item) -= ds[t] * params.user_emb.row(tr.user);
      }
    }
  } else {
    if (!adj) throw ConfigError("graph model requires an adjacency");
    const bool composite = cfg.kind == ObjectiveKind::SglComposite;
    if (composite && kind.variant != ModelVariant::Sgl)
      throw ConfigError("sgl objective requires the SGL model");
    if (composite && !views)
      throw ConfigError("sgl objective requires augmented views");

    Matrix e0 = params.stacked();
    Matrix main = propagate(*adj, e0, kind.layers);
    Eigen::VectorXd pos((int)batch.size()), neg((int)batch.size());
    for (int t = 0; t < (int)batch.size(); ++t) {
      const auto& tr = batch[t];
      pos[t] = main.row(tr.user).dot(main.row(m + tr.pos_item));
      neg[t] = main.row(tr.user).dot(main.row(m + tr.neg_item));
    }
    Eigen::VectorXd ds = bpr_score_grads(pos, neg, cfg.drop, with_drop, &loss);

    Matrix dmain = Matrix::Zero(main.rows(), main.cols());
    for (int t = 0; t < (int)batch.size(); ++t) {
      if (ds[t] == 0.0) continue;
      const auto& tr = batch[t];
      dmain.row(tr.user) +=
          ds[t] * (main.row(m + tr.pos_item) - main.row(m + tr.neg_item));
      dmain.row(m + tr.pos_item) += ds[t] * main.row(tr.user);
      dmain.row(m + tr.neg_item) -= ds[t] * main.row(tr.user);
    }
    // The propagation operator is symmetric, so the adjoint is itself.
    Matrix de0 = propagate(*adj, dmain, kind.layers);

    if (composite) {
      Matrix z1 = propagate(views->view1, e0, kind.layers);
      Matrix z2 = propagate(views->view2, e0, kind.layers);
      auto [users, items] = batch_nodes(batch, m);
      Matrix dz1 = Matrix::Zero(z1.rows(), z1.cols());
      Matrix dz2 = Matrix::Zero(z2.rows(), z2.cols());
      double cont = 0.0;
      for (int side = 0; side < 2; ++side) {
        if (side == 1 && !cfg.sgl_item_term) continue;
        const auto& nodes = side == 0 ? users : items;
        Matrix a = gather_rows(z1, nodes), b = gather_rows(z2, nodes);
        Matrix da, db;
        cont += contrastive_backward(a, b, kind.tau, da, db);
        for (int r = 0; r < (int)nodes.size(); ++r) {
          dz1.row(nodes[r]) += kind.gamma * da.row(r);
          dz2.row(nodes[r]) += kind.gamma * db.row(r);
        }
      }
      loss += kind.gamma * cont;
      de0 += propagate(views->view1, dz1, kind.layers) +
             propagate(views->view2, dz2, kind.layers);
    }
    g.user_emb = de0.topRows(m);
    g.item_emb = de0.bottomRows(params.n());
  }

  check_finite(g.user_emb, "user embeddings");
  check_finite(g.item_emb, "item embeddings");
  if (loss_out) *loss_out = loss;
  return g;
}

}  // namespace cfscale
