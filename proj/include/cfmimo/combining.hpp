// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "cfmimo/channel.hpp"
#include "cfmimo/rng.hpp"
#include "cfmimo/types.hpp"

namespace cfmimo {

enum class Receiver { Mrc, Zf };

std::string to_string(Receiver r);
Receiver receiver_from_string(const std::string& name);

// Per-SEU combiner matrices. Column k of w[l] is w_{l,k}; all-zero for UEs
// the SEU does not serve.
struct CombinerSet {
  Receiver kind = Receiver::Mrc;
  std::vector<CMat> w;       // per SEU, rows x K
  Real max_residual = 0.0;   // ZF: max |w^H gbar - delta| over served pairs
};

void mrc_combiners(const SimInstance& inst, const ChannelDraw& draw, CombinerSet& out);

// ZF over the served set U_l only, via thin QR of the masked estimate matrix.
// Throws std::runtime_error (naming the SEU) when K_l exceeds the antenna
// count or the estimate matrix is numerically rank deficient.
void zf_combiners(const SimInstance& inst, const ChannelDraw& draw, CombinerSet& out);

void make_combiners(const SimInstance& inst, const ChannelDraw& draw, Receiver kind,
                    CombinerSet& out);

// Inner products consumed by both the Monte Carlo rate evaluator and the
// empirical LSFD moments.
struct DrawProducts {
  std::vector<CMat> est;  // per SEU: W^H est_full, K x K
  std::vector<CMat> tru;  // per SEU: W^H g_true,  K x K
  Mat w_norm2;            // L x K
};

void draw_products(const SimInstance& inst, const ChannelDraw& draw, const CombinerSet& comb,
                   DrawProducts& out);

// Local symbol estimates x_hat(l, k) = w_{l,k}^H y_l for one uplink use with
// the given transmit symbols; receiver noise is drawn from `noise_rng`.
CMat local_estimates(const SimInstance& inst, const ChannelDraw& draw, const CombinerSet& comb,
                     const CVec& tx_symbols, RngStream& noise_rng);

// CPU fusion weights; column k holds mu_k over SEUs (exactly zero for
// non-serving SEUs). Fusion applies the conjugated weights.
struct LsfdWeights {
  CMat mu;  // L x K
  bool plug_in = false;
  int samples = 0;
};

// Empirical-moment LSFD: sample averages of z_{ki} z_{ki}^H, z_{kk} and
// ||w_{l,k}||^2 over a dedicated batch of channel draws.
LsfdWeights lsfd_weights(const SimInstance& inst, Receiver kind, int n_moment_samples);

// Closed-form LSFD moments for MRC (cross-check path, no sampling).
LsfdWeights lsfd_weights_plugin_mrc(const SimInstance& inst);

// x_hat_k = sum_l conj(mu_{l,k}) locals(l, k).
CVec cpu_fuse(const LsfdWeights& weights, const CMat& locals);

}  // namespace cfmimo
