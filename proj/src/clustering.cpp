// SPDX-License-Identifier: Apache-2.0
#include "cfmimo/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cfmimo {

BinMat threshold_selection(const Mat& lambda, Real threshold_db) {
  const int m = static_cast<int>(lambda.rows());
  const int k = static_cast<int>(lambda.cols());
  BinMat omega(m, k);
  if (std::isinf(threshold_db)) {
    omega.setOnes();
    return omega;
  }
  const Real ratio = db_to_linear(threshold_db);
  for (int kk = 0; kk < k; ++kk) {
    Eigen::Index strongest = 0;
    const Real peak = lambda.col(kk).maxCoeff(&strongest);
    const Real floor = peak / ratio;
    for (int mm = 0; mm < m; ++mm) omega(mm, kk) = lambda(mm, kk) >= floor ? 1 : 0;
    omega(static_cast<int>(strongest), kk) = 1;  // never leave a UE unserved
  }
  return omega;
}

void apply_load_cap(BinMat& omega, const Mat& lambda, int cap) {
  const int m = static_cast<int>(omega.rows());
  const int k = static_cast<int>(omega.cols());
  std::vector<int> ues;
  for (int mm = 0; mm < m; ++mm) {
    ues.clear();
    for (int kk = 0; kk < k; ++kk)
      if (omega(mm, kk)) ues.push_back(kk);
    if (static_cast<int>(ues.size()) <= cap) continue;
    std::stable_sort(ues.begin(), ues.end(),
                     [&](int a, int b) { return lambda(mm, a) > lambda(mm, b); });
    for (std::size_t i = cap; i < ues.size(); ++i) omega(mm, ues[i]) = 0;
  }
}

Eigen::MatrixXi overlap_matrix(const BinMat& omega) {
  const Eigen::MatrixXi w = omega.cast<int>();
  return w.transpose() * w;
}

Clustering build_clustering(const BinMat& omega, const Eigen::VectorXi& ap_to_seu, int num_seus) {
  const int m = static_cast<int>(omega.rows());
  const int k = static_cast<int>(omega.cols());
  if (ap_to_seu.size() != m)
    throw std::invalid_argument("build_clustering: ap_to_seu size mismatch");

  Clustering c;
  c.omega = omega;
  c.aps_of_seu.assign(num_seus, {});
  for (int mm = 0; mm < m; ++mm) {
    const int l = ap_to_seu(mm);
    if (l < 0 || l >= num_seus) throw std::invalid_argument("build_clustering: bad SEU index");
    c.aps_of_seu[l].push_back(mm);
  }

  c.aps_of_ue.assign(k, {});
  c.seu_serves = Eigen::MatrixXi::Zero(num_seus, k);
  for (int mm = 0; mm < m; ++mm)
    for (int kk = 0; kk < k; ++kk)
      if (omega(mm, kk)) {
        c.aps_of_ue[kk].push_back(mm);
        c.seu_serves(ap_to_seu(mm), kk) = 1;
      }

  c.served_by_seu.assign(num_seus, {});
  c.seus_of_ue.assign(k, {});
  for (int l = 0; l < num_seus; ++l)
    for (int kk = 0; kk < k; ++kk)
      if (c.seu_serves(l, kk)) {
        c.served_by_seu[l].push_back(kk);
        c.seus_of_ue[kk].push_back(l);
      }

  for (int kk = 0; kk < k; ++kk)
    if (c.aps_of_ue[kk].empty())
      throw std::runtime_error("clustering: UE " + std::to_string(kk) +
                               " is not served by any AP");
  return c;
}

Clustering select_clusters(const Layout& layout, const SimConfig& config) {
  BinMat omega = threshold_selection(layout.lambda, config.selection_threshold_db);
  if (config.max_ues_per_ap) {
    apply_load_cap(omega, layout.lambda, *config.max_ues_per_ap);
    // UEs orphaned by the cap fall back to their strongest AP.
    for (int kk = 0; kk < omega.cols(); ++kk) {
      if (omega.col(kk).cast<int>().sum() > 0) continue;
      Eigen::Index strongest = 0;
      layout.lambda.col(kk).maxCoeff(&strongest);
      omega(static_cast<int>(strongest), kk) = 1;
    }
  }
  return build_clustering(omega, layout.ap_to_seu, layout.num_seus());
}

}  // namespace cfmimo
