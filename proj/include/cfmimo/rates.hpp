// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "cfmimo/channel.hpp"
#include "cfmimo/combining.hpp"
#include "cfmimo/types.hpp"

namespace cfmimo {

// Moment-matched Gamma(shape, scale) for sum_m upsilon beta^2 ||hhat||^2.
struct GammaParams {
  Real shape = 0.0;  // phi
  Real scale = 0.0;  // theta
};

// `ups_beta_sq` holds upsilon * beta^2 per AP (zeros allowed); throws on an
// all-zero mask. shape * scale == n_antennas * sum(ups_beta_sq) exactly.
GammaParams gamma_match_estimate(const Vec& ups_beta_sq, int n_antennas);

// The MRC closed form circulates in two scalings that differ by one factor of
// N on every term except the noise. Consistent keeps the scaling the moment
// derivation produces (and Monte Carlo confirms); AsPublished reproduces the
// other variant for comparison against existing result tables.
enum class MrcScaling { Consistent, AsPublished };

Vec rate_mrc_closed_form(const SimInstance& inst, const LsfdWeights& weights,
                         MrcScaling scaling = MrcScaling::Consistent);

// Throws when some serving SEU has K_l > M_l * N.
Vec rate_zf_closed_form(const SimInstance& inst, const LsfdWeights& weights);

// How the per-SEU combiner outputs enter the instantaneous SINR.
//   Coherent: fuse amplitudes across SEUs before squaring, the rate actually
//     achieved by the weighted CPU estimate (default).
//   PerSeu: square each SEU's terms before summing, the form the closed-form
//     analysis bounds. ZF products are rescaled to the unit-norm combiner and
//     its interference is restricted to the UEs the SEU serves, matching the
//     closed form's accounting term for term; use for closed-form validation.
enum class SinrForm { Coherent, PerSeu };

struct McOptions {
  int n_draws = 10000;
  bool collect_per_draw = false;
  Real sinr_cap = 1e12;
  SinrForm form = SinrForm::Coherent;
};

struct McResult {
  Vec rate;              // K, mean of log2(1 + SINR) over draws
  Mat per_draw;          // n_draws x K when collected, else empty
  Real max_zf_residual = 0.0;
};

McResult rate_monte_carlo(const SimInstance& inst, Receiver kind, const LsfdWeights& weights,
                          const McOptions& opts);

// Exact first/second moments of the MRC combiner inner products
// (self, co-pilot estimate, and estimation-error terms).
struct MomentTable {
  std::vector<Mat> cross_m1;  // per SEU, K x K: E[w_k^H est_i], co-pilot only
  std::vector<Mat> cross_m2;  // per SEU, K x K: E[|w_k^H est_i|^2], all pairs
  std::vector<Mat> err_m2;    // per SEU, K x K: E[|w_k^H err_i|^2]
};

MomentTable exact_product_moments(const SimInstance& inst);

struct RateReport {
  Vec rate_mc;
  Vec rate_cf;
  Receiver receiver = Receiver::Mrc;
  int draws = 0;
  std::uint64_t seed = 0;         // layout master seed
  std::string fingerprint;        // config fingerprint
};

}  // namespace cfmimo
