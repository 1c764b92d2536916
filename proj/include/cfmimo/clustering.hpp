// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cfmimo/config.hpp"
#include "cfmimo/netgeom.hpp"
#include "cfmimo/types.hpp"

namespace cfmimo {

// AP m serves UE k when lambda(m,k) is within `threshold_db` of the strongest
// AP for that UE. An infinite threshold selects every AP.
BinMat threshold_selection(const Mat& lambda, Real threshold_db);

// Caps each AP at `cap` served UEs, keeping the strongest links
// (ties broken towards the lower UE index).
void apply_load_cap(BinMat& omega, const Mat& lambda, int cap);

// Pairwise serving-set overlap counts: entry (k, j) = |M_k intersect M_j|.
Eigen::MatrixXi overlap_matrix(const BinMat& omega);

struct Clustering {
  BinMat omega;                                 // M x K selection matrix
  std::vector<std::vector<int>> aps_of_seu;     // APs attached to each SEU
  std::vector<std::vector<int>> aps_of_ue;      // serving APs per UE
  std::vector<std::vector<int>> served_by_seu;  // U_l, sorted ascending
  std::vector<std::vector<int>> seus_of_ue;     // S_k, sorted ascending
  Eigen::MatrixXi seu_serves;                   // L x K, 1 when k in U_l

  int cluster_size(int ue) const { return static_cast<int>(aps_of_ue[ue].size()); }
};

// Full pipeline: threshold rule, optional per-AP load cap, then hierarchy
// bookkeeping. Throws std::runtime_error if any UE ends up unserved.
Clustering select_clusters(const Layout& layout, const SimConfig& config);

// Hierarchy bookkeeping for an externally supplied selection matrix.
Clustering build_clustering(const BinMat& omega, const Eigen::VectorXi& ap_to_seu, int num_seus);

}  // namespace cfmimo
