// SPDX-License-Identifier: Apache-2.0
#include "cfmimo/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace cfmimo {

EstimationStats build_estimation_stats(const Layout& layout, const Clustering& clustering,
                                       const PilotAssignment& pilots, const Powers& powers) {
  const int m = layout.num_aps();
  const int k = layout.num_ues();
  const int tau = pilots.num_pilots;

  EstimationStats st;
  st.gamma_p.resize(layout.num_seus());
  for (int l = 0; l < layout.num_seus(); ++l) st.gamma_p(l) = powers.gamma_pilot(l);

  // Per-(AP, pilot) cohort gain sums drive both beta and the projection norm.
  Mat cohort_sum = Mat::Zero(m, tau);
  for (int kk = 0; kk < k; ++kk) cohort_sum.col(pilots.pilot_of_ue(kk)) += layout.lambda.col(kk);

  st.beta.resize(m, k);
  st.eta.resize(m, k);
  st.kappa.resize(m, k);
  st.pilot_denom.resize(m, tau);
  for (int mm = 0; mm < m; ++mm) {
    const int l = layout.ap_to_seu(mm);
    for (int t = 0; t < tau; ++t)
      st.pilot_denom(mm, t) =
          std::sqrt(powers.rho_pilot * cohort_sum(mm, t) + powers.sigma2_pilot(l));
    for (int kk = 0; kk < k; ++kk) {
      const Real lam = layout.lambda(mm, kk);
      const Real beta =
          compute_beta(lam, cohort_sum(mm, pilots.pilot_of_ue(kk)), st.gamma_p(l));
      st.beta(mm, kk) = beta;
      st.eta(mm, kk) = std::max(lam - beta * beta, 0.0);
      st.kappa(mm, kk) = clustering.omega(mm, kk) ? beta : 0.0;
    }
  }
  return st;
}

namespace {

// Repeats each row of `src` (one per AP) n times so it aligns with the
// antenna-stacked draw matrices.
CMat expand_rows(const Mat& src, int n) {
  CMat out(src.rows() * n, src.cols());
  for (Eigen::Index r = 0; r < src.rows(); ++r)
    for (int a = 0; a < n; ++a)
      out.row(r * n + a) = src.row(r).cast<Complex>();
  return out;
}

}  // namespace

SimInstance assemble_instance(const SimConfig& config, Layout layout) {
  SimInstance inst;
  inst.config = config;
  inst.layout = std::move(layout);
  inst.clustering = select_clusters(inst.layout, config);
  inst.pilots = assign_pilots(config, inst.layout);
  inst.powers = make_powers(config, inst.layout.num_seus());
  inst.stats = build_estimation_stats(inst.layout, inst.clustering, inst.pilots, inst.powers);
  inst.num_antennas = config.antennas_per_ap;

  const int k = inst.num_ues();
  const int n = inst.num_antennas;
  inst.cohort_ind = CMat::Zero(k, inst.pilots.num_pilots);
  for (int kk = 0; kk < k; ++kk) inst.cohort_ind(kk, inst.pilots.pilot_of_ue(kk)) = 1.0;

  inst.seu.resize(inst.num_seus());
  for (int l = 0; l < inst.num_seus(); ++l) {
    SeuBlock& blk = inst.seu[l];
    blk.aps = inst.clustering.aps_of_seu[l];
    const int ml = static_cast<int>(blk.aps.size());
    blk.rows = ml * n;
    blk.lambda.resize(ml, k);
    blk.beta.resize(ml, k);
    blk.eta.resize(ml, k);
    blk.mask.resize(ml, k);
    Mat proj(ml, k);
    for (int r = 0; r < ml; ++r) {
      const int mm = blk.aps[r];
      blk.lambda.row(r) = inst.layout.lambda.row(mm);
      blk.beta.row(r) = inst.stats.beta.row(mm);
      blk.eta.row(r) = inst.stats.eta.row(mm);
      for (int kk = 0; kk < k; ++kk) {
        blk.mask(r, kk) = inst.clustering.omega(mm, kk) ? 1.0 : 0.0;
        proj(r, kk) =
            inst.stats.beta(mm, kk) / inst.stats.pilot_denom(mm, inst.pilots.pilot_of_ue(kk));
      }
    }
    blk.sqrt_lambda_rows = expand_rows(blk.lambda.cwiseSqrt(), n);
    blk.mask_rows = expand_rows(blk.mask, n);
    blk.proj_rows = expand_rows(proj, n);
    blk.sigma2_ul = inst.powers.sigma2_ul(l);
    blk.sigma_pilot = std::sqrt(inst.powers.sigma2_pilot(l));
  }
  return inst;
}

SimInstance build_instance(const SimConfig& config, std::uint64_t layout_index) {
  config.validate();
  return assemble_instance(config, generate_layout(config, layout_index));
}

void draw_channel(const SimInstance& inst, StreamPurpose purpose, std::uint64_t draw_index,
                  ChannelDraw& out) {
  const int num_seus = inst.num_seus();
  const int k = inst.num_ues();
  const int tau = inst.pilots.num_pilots;
  const Real sqrt_rho_p = std::sqrt(inst.powers.rho_pilot);

  out.g_true.resize(num_seus);
  out.est_full.resize(num_seus);
  out.est_masked.resize(num_seus);
  out.h_ws.resize(num_seus);
  out.np_ws.resize(num_seus);
  out.yb_ws.resize(num_seus);

  auto rng = RngStream::substream(inst.master_seed(), purpose, draw_index);
  for (int l = 0; l < num_seus; ++l) {
    const SeuBlock& blk = inst.seu[l];
    CMat& h = out.h_ws[l];
    CMat& np = out.np_ws[l];
    CMat& yb = out.yb_ws[l];
    h.resize(blk.rows, k);
    np.resize(blk.rows, tau);
    rng.fill_cnormal(h);
    rng.fill_cnormal(np);

    out.g_true[l] = blk.sqrt_lambda_rows.cwiseProduct(h);
    yb.noalias() = sqrt_rho_p * (out.g_true[l] * inst.cohort_ind);
    yb += blk.sigma_pilot * np;
    // est_full(row, k) = beta/denom * ybreve(row, t_k)
    out.est_full[l].noalias() = yb * inst.cohort_ind.transpose();
    out.est_full[l] = out.est_full[l].cwiseProduct(blk.proj_rows);
    out.est_masked[l] = out.est_full[l].cwiseProduct(blk.mask_rows);
  }
}

}  // namespace cfmimo
