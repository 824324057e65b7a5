// Copyright 2026 the cfscale authors
// SPDX-License-Identifier: Apache-2.0

#include "cfscale/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "cfscale/errors.hpp"

namespace cfscale {

Spectrum eigen_spectrum(const NormAdj& adj, int dense_limit) {
  if (adj.size() > dense_limit)
    throw CapacityError("graph too large for dense eigendecomposition (" +
                        std::to_string(adj.size()) + " > " +
                        std::to_string(dense_limit) +
                        "); use power iteration instead");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(adj.dense());
  if (solver.info() != Eigen::Success)
    throw NumericError("eigendecomposition failed to converge");

  const auto& vals = solver.eigenvalues();
  std::vector<int> order(vals.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(vals[a]) > std::abs(vals[b]);
  });

  Spectrum s;
  s.eigenvalues.resize(vals.size());
  s.eigenvectors.resize(vals.size(), vals.size());
  for (int k = 0; k < (int)order.size(); ++k) {
    s.eigenvalues[k] = vals[order[k]];
    s.eigenvectors.col(k) = solver.eigenvectors().col(order[k]);
  }
  return s;
}

double spectral_radius_power_iteration(const NormAdj& adj, int iters) {
  Matrix v = Matrix::Ones(adj.size(), 1);
  v /= v.norm();
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    // propagate with L=1 gives (I+A)/2*v; undo to get A*v
    Matrix av = 2.0 * propagate(adj, v, 1) - v;
    double norm = av.norm();
    if (norm == 0.0) return 0.0;
    lambda = (v.transpose() * av)(0, 0);
    v = av / norm;
  }
  return std::abs(lambda);
}

double filter_response(int layers, double lambda) {
  if (layers < 0) throw ConfigError("layer count must be >= 0");
  double acc = 1.0;  // lambda^0 term
  double pw = 1.0;
  for (int l = 1; l <= layers; ++l) {
    pw *= lambda;
    acc += pw;
  }
  return acc / (double)(layers + 1);
}

void export_spectrum_csv(const Spectrum& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open output file: " + path);
  out << "index,eigenvalue\n";
  out.precision(17);
  for (int k = 0; k < (int)s.eigenvalues.size(); ++k)
    out << k << "," << s.eigenvalues[k] << "\n";
}

}  // namespace cfscale
