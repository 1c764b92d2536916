// SPDX-License-Identifier: Apache-2.0
#include "cfmimo/netgeom.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cfmimo {

Eigen::VectorXi nearest_index(const MatX<Real>& points, const MatX<Real>& centers) {
  if (centers.rows() == 0) throw std::invalid_argument("nearest_index: no centers");
  Eigen::VectorXi out(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    Eigen::Index best = 0;
    (centers.rowwise() - points.row(i)).rowwise().squaredNorm().minCoeff(&best);
    out(static_cast<int>(i)) = static_cast<int>(best);
  }
  return out;
}

MatX<Real> sample_disk(int n, Real radius, RngStream& rng) {
  MatX<Real> pts(n, 2);
  for (int i = 0; i < n; ++i) {
    const Real r = radius * std::sqrt(rng.uniform());
    const Real phi = 2.0 * std::numbers::pi_v<Real> * rng.uniform();
    pts(i, 0) = r * std::cos(phi);
    pts(i, 1) = r * std::sin(phi);
  }
  return pts;
}

void recompute_large_scale(Layout& layout, const SimConfig& config) {
  const int m = layout.num_aps();
  const int k = layout.num_ues();
  layout.distances = pairwise_distances<Real>(layout.ap_positions, layout.ue_positions)
                         .cwiseMax(config.min_access_distance_m);
  if (layout.shadow_db.rows() != m || layout.shadow_db.cols() != k)
    layout.shadow_db = Mat::Zero(m, k);
  layout.lambda.resize(m, k);
  for (int mm = 0; mm < m; ++mm)
    for (int kk = 0; kk < k; ++kk)
      layout.lambda(mm, kk) =
          pathloss(config.pathloss_constant, config.pathloss_exponent, layout.distances(mm, kk)) *
          db_to_linear(layout.shadow_db(mm, kk));
  layout.ap_to_seu = nearest_index(layout.ap_positions, layout.seu_positions);
}

Layout generate_layout(const SimConfig& config, std::uint64_t layout_index) {
  const std::uint64_t master =
      mix_seed(config.rng_seed, StreamPurpose::LayoutRealization, layout_index);

  Layout layout;
  layout.master_seed = master;
  {
    auto rng = RngStream::substream(master, StreamPurpose::ApPositions);
    layout.ap_positions = sample_disk(config.num_aps, config.area_radius_m, rng);
  }
  {
    auto rng = RngStream::substream(master, StreamPurpose::SeuPositions);
    layout.seu_positions = sample_disk(config.num_seus, config.area_radius_m, rng);
  }
  {
    auto rng = RngStream::substream(master, StreamPurpose::UePositions);
    layout.ue_positions = sample_disk(config.num_ues, config.area_radius_m, rng);
  }
  layout.shadow_db = Mat::Zero(config.num_aps, config.num_ues);
  if (config.shadowing_sigma_db > 0.0) {
    auto rng = RngStream::substream(master, StreamPurpose::Shadowing);
    for (int m = 0; m < config.num_aps; ++m)
      for (int k = 0; k < config.num_ues; ++k)
        layout.shadow_db(m, k) = config.shadowing_sigma_db * rng.normal();
  }
  recompute_large_scale(layout, config);
  return layout;
}

}  // namespace cfmimo
