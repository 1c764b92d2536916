// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "cfmimo/config.hpp"
#include "cfmimo/rng.hpp"
#include "cfmimo/types.hpp"

namespace cfmimo {

// Euclidean distances between the rows of `a` (n x 2) and rows of `b` (m x 2).
template <typename S>
MatX<S> pairwise_distances(const MatX<S>& a, const MatX<S>& b) {
  MatX<S> d(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    d.row(i) = (b.rowwise() - a.row(i)).rowwise().norm().transpose();
  return d;
}

template <typename S>
S pathloss(S constant, S exponent, S distance) {
  return constant * std::pow(distance, -exponent);
}

// Index of the nearest row of `centers` for every row of `points`.
Eigen::VectorXi nearest_index(const MatX<Real>& points, const MatX<Real>& centers);

// n points uniform over a disk of the given radius centered at the origin.
MatX<Real> sample_disk(int n, Real radius, RngStream& rng);

struct Layout {
  MatX<Real> ap_positions;    // M x 2
  MatX<Real> seu_positions;   // L x 2
  MatX<Real> ue_positions;    // K x 2
  Eigen::VectorXi ap_to_seu;  // M, nearest-SEU association
  Mat distances;              // M x K, clamped below by min_access_distance_m
  Mat shadow_db;              // M x K, zero when shadowing is disabled
  Mat lambda;                 // M x K large-scale coefficients
  std::uint64_t master_seed = 0;  // root for every downstream random stream

  int num_aps() const { return static_cast<int>(ap_positions.rows()); }
  int num_seus() const { return static_cast<int>(seu_positions.rows()); }
  int num_ues() const { return static_cast<int>(ue_positions.rows()); }
};

// Draws one network realization. `layout_index` selects independent
// realizations under the same config seed.
Layout generate_layout(const SimConfig& config, std::uint64_t layout_index = 0);

// Rebuilds distances/lambda from the positions already stored in `layout`
// (used after positions are overridden, e.g. co-locating SEUs with APs).
void recompute_large_scale(Layout& layout, const SimConfig& config);

}  // namespace cfmimo
