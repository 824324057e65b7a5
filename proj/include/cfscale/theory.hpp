// Copyright 2026 the cfscale authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "cfscale/dataset.hpp"
#include "cfscale/model.hpp"

namespace cfscale {

/// Strongly convex toy problem: l(theta; x) = 0.5 * ||theta - x||^2 with
/// identity Hessian, so the mixture minimizer is closed-form.
struct QuadraticInstance {
  Eigen::VectorXd clean_anchor;
  Eigen::VectorXd noise_anchor;
};

struct BoundReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  bool holds = false;
  std::string csv_row() const;  // "lhs,rhs,ratio,verdict"
};

// lhs = ||Theta_delta - Theta_0||_F^2 with Theta_delta the mixture minimizer,
// rhs = delta^2 * ||H^{-1} Delta_noise||_F^2; equality on quadratics.
BoundReport verify_perturbation_bound(const QuadraticInstance& inst,
                                      double delta);

// lhs = spectral norm of the finite-difference input Jacobian of a ReLU MLP,
// rhs = product of layer spectral norms.
BoundReport jacobian_bound_check(const std::vector<Matrix>& mlp_weights,
                                 const Eigen::VectorXd& input);

// Max elementwise deviation between mean neighbor aggregation and the
// equivalent convex combination with weights 1/|N_i|; isolated items skipped.
double mixup_equivalence_check(const Dataset& train, const Matrix& user_emb);

struct SubspaceReport {
  int rank = 0;
  std::vector<double> residual_norms;  // per node
  double epsilon_hat = 0.0;            // max residual
};

// S = top-r principal directions (row space) of the noise-free embeddings;
// residual per node = ||(I - Proj_S) z_u||_2.
SubspaceReport subspace_projection_report(const Matrix& embeddings,
                                          const Matrix& clean_embeddings,
                                          int rank);

}  // namespace cfscale
