// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "cfmimo/clustering.hpp"
#include "cfmimo/config.hpp"
#include "cfmimo/netgeom.hpp"
#include "cfmimo/pilots.hpp"
#include "cfmimo/rng.hpp"
#include "cfmimo/types.hpp"

namespace cfmimo {

// beta = lambda_self / sqrt(lambda_cohort_sum + 1/gamma_p); the cohort sum
// includes the UE itself.
template <typename S>
S compute_beta(S lambda_self, S lambda_cohort_sum, S gamma_p) {
  return lambda_self / std::sqrt(lambda_cohort_sum + S(1) / gamma_p);
}

// Deterministic estimation statistics. beta^2 is the per-antenna variance of
// the channel estimate, eta = lambda - beta^2 the error variance.
struct EstimationStats {
  Mat beta;         // M x K
  Mat eta;          // M x K
  Mat kappa;        // M x K, selection-masked beta
  Vec gamma_p;      // L, training SNR per SEU
  Mat pilot_denom;  // M x tau, sqrt(rho_p * cohort lambda sum + sigma2_p)
};

EstimationStats build_estimation_stats(const Layout& layout, const Clustering& clustering,
                                       const PilotAssignment& pilots, const Powers& powers);

// Per-SEU cache of everything a channel draw needs, rows stacked AP-major
// (N consecutive rows per AP, APs in aps_of_seu order).
struct SeuBlock {
  std::vector<int> aps;  // global AP indices
  int rows = 0;          // |aps| * N
  Mat lambda;            // M_l x K
  Mat beta;              // M_l x K
  Mat eta;               // M_l x K
  Mat mask;              // M_l x K, upsilon as 0/1
  CMat sqrt_lambda_rows; // rows x K
  CMat mask_rows;        // rows x K
  CMat proj_rows;        // rows x K, beta / pilot_denom at the UE's pilot
  Real sigma2_ul = 0.0;
  Real sigma_pilot = 0.0;  // per-entry pilot noise std dev
};

struct SimInstance {
  SimConfig config;
  Layout layout;
  Clustering clustering;
  PilotAssignment pilots;
  Powers powers;
  EstimationStats stats;
  std::vector<SeuBlock> seu;
  CMat cohort_ind;  // K x tau, entry (k, t_k) = 1
  int num_antennas = 0;

  int num_aps() const { return layout.num_aps(); }
  int num_seus() const { return layout.num_seus(); }
  int num_ues() const { return layout.num_ues(); }
  std::uint64_t master_seed() const { return layout.master_seed; }
};

// Clustering + pilots + powers + estimation statistics for a given layout.
SimInstance assemble_instance(const SimConfig& config, Layout layout);
SimInstance build_instance(const SimConfig& config, std::uint64_t layout_index = 0);

// One small-scale realization: true channels, pilot observation, estimates.
// est_full is the unmasked MMSE estimate beta * hhat (defined for every link,
// so g_true = est_full + error exactly); est_masked zeroes unserved links.
struct ChannelDraw {
  std::vector<CMat> g_true;      // per SEU, rows x K
  std::vector<CMat> est_full;    // per SEU, rows x K
  std::vector<CMat> est_masked;  // per SEU, rows x K

  // scratch, reused across draws
  std::vector<CMat> h_ws, np_ws, yb_ws;
};

void draw_channel(const SimInstance& inst, StreamPurpose purpose, std::uint64_t draw_index,
                  ChannelDraw& out);

}  // namespace cfmimo
