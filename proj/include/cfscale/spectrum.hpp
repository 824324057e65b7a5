// Copyright 2026 the cfscale authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include <Eigen/Dense>

#include "cfscale/adjacency.hpp"

namespace cfscale {

/// Dense symmetric eigendecomposition, eigenvalues descending by |lambda|.
struct Spectrum {
  Eigen::VectorXd eigenvalues;
  Matrix eigenvectors;  // orthonormal columns, same order as eigenvalues
};

inline constexpr int kDefaultDenseLimit = 2000;

Spectrum eigen_spectrum(const NormAdj& adj, int dense_limit = kDefaultDenseLimit);

// Extreme-eigenvalue estimate for graphs above the dense limit.
double spectral_radius_power_iteration(const NormAdj& adj, int iters = 200);

// h(lambda) = (1/(L+1)) * sum_{l=0..L} lambda^l, with lambda^0 := 1.
double filter_response(int layers, double lambda);

void export_spectrum_csv(const Spectrum& s, const std::string& path);

}  // namespace cfscale
