// Copyright 2026 the cfscale authors
// SPDX-License-Identifier: Apache-2.0

#include "cfscale/theory.hpp"

#include <cmath>

#include <Eigen/SVD>

#include "cfscale/errors.hpp"

namespace cfscale {

std::string BoundReport::csv_row() const {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%s", lhs, rhs, ratio,
                holds ? "true" : "false");
  return buf;
}

namespace {

BoundReport make_report(double lhs, double rhs) {
  BoundReport r;
  r.lhs = lhs;
  r.rhs = rhs;
  r.ratio = rhs == 0.0 ? (lhs == 0.0 ? 0.0 : INFINITY) : lhs / rhs;
  r.holds = lhs <= rhs * (1.0 + 1e-9);
  return r;
}

}  // namespace

BoundReport verify_perturbation_bound(const QuadraticInstance& inst,
                                      double delta) {
  if (delta < 0.0 || delta >= 1.0)
    throw ConfigError("delta must lie in [0,1)");
  if (inst.clean_anchor.size() != inst.noise_anchor.size())
    throw ShapeError("anchors must have equal dimension");
  // minimizer of (1-delta)*0.5||t-x0||^2 + delta*0.5||t-xn||^2
  Eigen::VectorXd theta_delta =
      (1.0 - delta) * inst.clean_anchor + delta * inst.noise_anchor;
  double lhs = (theta_delta - inst.clean_anchor).squaredNorm();
  // H = I, Delta_noise = grad_noise - grad_clean at Theta_0 = x0 - xn
  double rhs =
      delta * delta * (inst.clean_anchor - inst.noise_anchor).squaredNorm();
  return make_report(lhs, rhs);
}

namespace {

Eigen::VectorXd relu_mlp(const std::vector<Matrix>& weights,
                         const Eigen::VectorXd& x) {
  Eigen::VectorXd h = x;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (weights[l].cols() != h.size())
      throw ShapeError("layer " + std::to_string(l) + " shape mismatch");
    h = weights[l] * h;
    if (l + 1 < weights.size()) h = h.cwiseMax(0.0);  // linear last layer
  }
  return h;
}

}  // namespace

BoundReport jacobian_bound_check(const std::vector<Matrix>& mlp_weights,
                                 const Eigen::VectorXd& input) {
  if (mlp_weights.empty()) throw ShapeError("at least one layer required");
  const auto out_dim = relu_mlp(mlp_weights, input).size();
  const auto in_dim = input.size();

  const double step = 1e-6;
  Matrix jac(out_dim, in_dim);
  for (Eigen::Index c = 0; c < in_dim; ++c) {
    Eigen::VectorXd xp = input, xm = input;
    xp[c] += step;
    xm[c] -= step;
    jac.col(c) = (relu_mlp(mlp_weights, xp) - relu_mlp(mlp_weights, xm)) /
                 (2.0 * step);
  }
  double lhs = Eigen::JacobiSVD<Matrix>(jac).singularValues()(0);
  double rhs = 1.0;
  for (const auto& w : mlp_weights)
    rhs *= Eigen::JacobiSVD<Matrix>(w).singularValues()(0);
  return make_report(lhs, rhs);
}

double mixup_equivalence_check(const Dataset& train, const Matrix& user_emb) {
  if (user_emb.rows() != train.m)
    throw ShapeError("embedding rows must equal user count");
  std::vector<std::vector<int>> item_neighbors(train.n);
  for (const auto& it : train.interactions)
    item_neighbors[it.item].push_back(it.user);

  double max_dev = 0.0;
  for (int i = 0; i < train.n; ++i) {
    const auto& nbrs = item_neighbors[i];
    if (nbrs.empty()) continue;  // isolated item, skipped
    // route A: sum then divide
    Eigen::RowVectorXd agg = Eigen::RowVectorXd::Zero(user_emb.cols());
    for (int u : nbrs) agg += user_emb.row(u);
    agg /= (double)nbrs.size();
    // route B: convex combination with lambda = 1/|N_i|
    const double lambda = 1.0 / (double)nbrs.size();
    Eigen::RowVectorXd mix = Eigen::RowVectorXd::Zero(user_emb.cols());
    double lambda_sum = 0.0;
    for (int u : nbrs) {
      mix += lambda * user_emb.row(u);
      lambda_sum += lambda;
    }
    if (std::abs(lambda_sum - 1.0) > 1e-9)
      throw NumericError("mixup weights do not sum to 1");
    max_dev = std::max(max_dev, (agg - mix).cwiseAbs().maxCoeff());
  }
  return max_dev;
}

SubspaceReport subspace_projection_report(const Matrix& embeddings,
                                          const Matrix& clean_embeddings,
                                          int rank) {
  if (embeddings.rows() != clean_embeddings.rows() ||
      embeddings.cols() != clean_embeddings.cols())
    throw ShapeError("embedding shapes must match");
  if (rank < 1 || rank >= embeddings.cols())
    throw ConfigError("rank must satisfy 1 <= r < k");
  Eigen::BDCSVD<Matrix> svd(clean_embeddings, Eigen::ComputeThinV);
  if (svd.singularValues()(rank - 1) <= 1e-12 * svd.singularValues()(0))
    throw NumericError("clean embeddings are rank-deficient below r");

  Matrix basis = svd.matrixV().leftCols(rank);  // k x r, orthonormal
  SubspaceReport report;
  report.rank = rank;
  report.residual_norms.resize((std::size_t)embeddings.rows());
  for (Eigen::Index u = 0; u < embeddings.rows(); ++u) {
    Eigen::VectorXd z = embeddings.row(u).transpose();
    Eigen::VectorXd residual = z - basis * (basis.transpose() * z);
    report.residual_norms[(std::size_t)u] = residual.norm();
    report.epsilon_hat = std::max(report.epsilon_hat, residual.norm());
  }
  return report;
}

}  // namespace cfscale
