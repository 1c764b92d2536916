// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "cfmimo/harness.hpp"
#include "cfmimo/rates.hpp"

using namespace cfmimo;

namespace {

SimInstance single_link_instance(int antennas, Real noise_dbm) {
  SimConfig cfg;
  cfg.num_aps = 1;
  cfg.num_seus = 1;
  cfg.num_ues = 1;
  cfg.antennas_per_ap = antennas;
  cfg.num_pilots = 1;
  cfg.noise_power_dbm = noise_dbm;
  cfg.rng_seed = 61;
  return build_instance(cfg);
}

LsfdWeights unit_weights(const SimInstance& inst) {
  LsfdWeights w;
  w.mu = CMat::Zero(inst.num_seus(), inst.num_ues());
  for (int k = 0; k < inst.num_ues(); ++k)
    for (int l : inst.clustering.seus_of_ue[k]) w.mu(l, k) = Complex(1.0, 0.0);
  return w;
}

// Co-located co-pilot pair served by both APs of one SEU.
SimInstance copilot_pair_instance() {
  SimConfig cfg;
  cfg.num_aps = 2;
  cfg.num_seus = 1;
  cfg.num_ues = 2;
  cfg.antennas_per_ap = 2;
  cfg.num_pilots = 1;
  cfg.selection_threshold_db = std::numeric_limits<Real>::infinity();
  cfg.rng_seed = 62;

  Layout layout;
  layout.master_seed = 606;
  layout.ap_positions.resize(2, 2);
  layout.ap_positions << -100.0, 0.0, 100.0, 0.0;
  layout.seu_positions = MatX<Real>::Zero(1, 2);
  layout.ue_positions.resize(2, 2);
  layout.ue_positions << 0.0, 50.0, 0.0, 50.0;  // identical location
  recompute_large_scale(layout, cfg);
  return assemble_instance(cfg, layout);
}

}  // namespace

TEST_SUITE_BEGIN("rates");

TEST_CASE("gamma match on hand-evaluated masks") {
  // Equal served entries collapse to (N * M_l, b).
  Vec equal = Vec::Constant(3, 0.25);
  GammaParams g = gamma_match_estimate(equal, 2);
  CHECK(g.shape == doctest::Approx(6.0));
  CHECK(g.scale == doctest::Approx(0.25));

  // A single served AP gives shape N, scale beta^2.
  Vec single(1);
  single << 0.7;
  g = gamma_match_estimate(single, 4);
  CHECK(g.shape == doctest::Approx(4.0));
  CHECK(g.scale == doctest::Approx(0.7));

  // Mixed magnitudes: beta^2 = [1, 4], N = 2.
  Vec mixed(2);
  mixed << 1.0, 4.0;
  g = gamma_match_estimate(mixed, 2);
  CHECK(g.shape == doctest::Approx(50.0 / 17.0));
  CHECK(g.scale == doctest::Approx(17.0 / 5.0));
  CHECK(g.shape * g.scale == doctest::Approx(10.0));

  // Zeros are allowed as long as one entry survives.
  Vec masked(3);
  masked << 0.0, 0.5, 0.0;
  g = gamma_match_estimate(masked, 3);
  CHECK(g.shape == doctest::Approx(3.0));
  CHECK(g.scale == doctest::Approx(0.5));

  CHECK_THROWS_AS(gamma_match_estimate(Vec::Zero(4), 2), std::invalid_argument);
}

TEST_CASE("gamma match preserves the mean for random masks") {
  RngStream rng(622);
  for (int trial = 0; trial < 1000; ++trial) {
    const int m = 1 + static_cast<int>(rng.uniform() * 12);
    Vec v(m);
    bool any = false;
    for (int i = 0; i < m; ++i) {
      const bool on = rng.uniform() < 0.7;
      v(i) = on ? std::exp(4.0 * rng.normal()) : 0.0;
      any = any || on;
    }
    if (!any) v(0) = 1.0;
    const GammaParams g = gamma_match_estimate(v, 4);
    CHECK(g.shape * g.scale == doctest::Approx(4.0 * v.sum()).epsilon(1e-13));
    // Second-moment identity: shape * scale^2 is the matched variance.
    CHECK(g.shape * g.scale * g.scale == doctest::Approx(4.0 * v.squaredNorm()).epsilon(1e-13));
  }
}

TEST_CASE("exact product moments match sampled combiner products") {
  const SimInstance inst = copilot_pair_instance();
  const MomentTable mom = exact_product_moments(inst);

  const int n_draws = 40000;
  CMat m1 = CMat::Zero(2, 2);
  Mat m2 = Mat::Zero(2, 2);
  Mat e2 = Mat::Zero(2, 2);
  ChannelDraw d;
  for (int i = 0; i < n_draws; ++i) {
    draw_channel(inst, StreamPurpose::RateDraws, i, d);
    const CMat& w = d.est_masked[0];
    const CMat zi = w.adjoint() * d.est_full[0];
    const CMat ze = w.adjoint() * (d.g_true[0] - d.est_full[0]);
    m1 += zi;
    m2 += zi.cwiseAbs2();
    e2 += ze.cwiseAbs2();
  }
  m1 /= static_cast<Real>(n_draws);
  m2 /= static_cast<Real>(n_draws);
  e2 /= static_cast<Real>(n_draws);

  for (int kk = 0; kk < 2; ++kk)
    for (int i = 0; i < 2; ++i) {
      CHECK(m1(kk, i).real() == doctest::Approx(mom.cross_m1[0](kk, i)).epsilon(0.02));
      CHECK(std::abs(m1(kk, i).imag()) <= 0.01 * mom.cross_m1[0](kk, kk));
      CHECK(m2(kk, i) == doctest::Approx(mom.cross_m2[0](kk, i)).epsilon(0.03));
      CHECK(e2(kk, i) == doctest::Approx(mom.err_m2[0](kk, i)).epsilon(0.03));
    }
}

TEST_CASE("MRC closed form reduces to the single-link formula") {
  for (int n : {1, 4}) {
    const SimInstance inst = single_link_instance(n, -84.0);
    const Real beta2 = inst.stats.beta(0, 0) * inst.stats.beta(0, 0);
    const Real eta = inst.stats.eta(0, 0);
    const Real rho = inst.powers.rho_ul(0);
    const Real sigma2 = inst.powers.sigma2_ul(0);

    // num = rho (N beta^2)^2, den = rho N beta^2 eta + sigma^2 N beta^2.
    const Real sinr = rho * n * beta2 / (rho * eta + sigma2);
    const Vec rate = rate_mrc_closed_form(inst, unit_weights(inst));
    CHECK(rate(0) == doctest::Approx(std::log2(1.0 + sinr)).epsilon(1e-12));
  }
}

TEST_CASE("vanishing noise runs into the SINR cap") {
  const SimInstance inst = single_link_instance(4, -250.0);
  const Vec rate = rate_mrc_closed_form(inst, unit_weights(inst));
  CHECK(rate(0) == doctest::Approx(std::log2(1.0 + 1e12)).epsilon(1e-12));
  const Vec zf = rate_zf_closed_form(inst, unit_weights(inst));
  CHECK(zf(0) == doctest::Approx(std::log2(1.0 + 1e12)).epsilon(1e-12));
}

TEST_CASE("co-pilot interference of a twin UE equals its desired power") {
  const SimInstance inst = copilot_pair_instance();
  const SeuBlock& blk = inst.seu[0];
  const Real n = inst.num_antennas;
  const Real rho = inst.powers.rho_ul(0);
  const Real sigma2 = inst.powers.sigma2_ul(0);

  const Real s = blk.beta.col(0).cwiseAbs2().sum();
  const Real i3 = 2.0 * rho * n * blk.beta.col(0).cwiseAbs2().dot(blk.eta.col(0));
  const Real num = rho * (n * s) * (n * s);
  const Real den = num + i3 + sigma2 * n * s;  // I1 == num for identical twins

  const Vec rate = rate_mrc_closed_form(inst, unit_weights(inst));
  CHECK(rate(0) == doctest::Approx(std::log2(1.0 + num / den)).epsilon(1e-12));
  CHECK(rate(1) == doctest::Approx(rate(0)).epsilon(1e-12));
}

TEST_CASE("powering down the interferers leaves noise and self terms") {
  SimInstance inst = copilot_pair_instance();
  inst.powers.rho_ul(1) = 0.0;
  const SeuBlock& blk = inst.seu[0];
  const Real n = inst.num_antennas;
  const Real rho = inst.powers.rho_ul(0);
  const Real sigma2 = inst.powers.sigma2_ul(0);

  const Real s = blk.beta.col(0).cwiseAbs2().sum();
  const Real i3 = rho * n * blk.beta.col(0).cwiseAbs2().dot(blk.eta.col(0));
  const Real sinr = rho * (n * s) * (n * s) / (i3 + sigma2 * n * s);
  const Vec rate = rate_mrc_closed_form(inst, unit_weights(inst));
  CHECK(rate(0) == doctest::Approx(std::log2(1.0 + sinr)).epsilon(1e-12));
}

TEST_CASE("the published scaling removes one antenna factor") {
  const SimInstance inst = single_link_instance(4, -84.0);
  const Real beta2 = inst.stats.beta(0, 0) * inst.stats.beta(0, 0);
  const Real eta = inst.stats.eta(0, 0);
  const Real rho = inst.powers.rho_ul(0);
  const Real sigma2 = inst.powers.sigma2_ul(0);

  // num = rho N beta^4, den = rho eta beta^2 + sigma^2 N beta^2.
  const Real sinr = rho * 4.0 * beta2 * beta2 / (rho * eta * beta2 + sigma2 * 4.0 * beta2);
  const Vec rate = rate_mrc_closed_form(inst, unit_weights(inst), MrcScaling::AsPublished);
  CHECK(rate(0) == doctest::Approx(std::log2(1.0 + sinr)).epsilon(1e-12));
}

TEST_CASE("ZF closed form matches a direct evaluation") {
  const SimInstance inst = copilot_pair_instance();
  const SeuBlock& blk = inst.seu[0];
  const Real n = inst.num_antennas;
  const Real rows = blk.rows;
  const Real rho = inst.powers.rho_ul(0);
  const Real sigma2 = inst.powers.sigma2_ul(0);

  const Real s = blk.beta.col(0).cwiseAbs2().sum();
  const Real num = rho * ((rows - 2.0 + 1.0) / rows) * n * s;
  Real interference = 0.0;
  for (int kp = 0; kp < 2; ++kp)
    interference += rho * n * blk.eta.col(kp).sum() / rows;  // full mask for UE 0
  const Vec rate = rate_zf_closed_form(inst, unit_weights(inst));
  CHECK(rate(0) ==
        doctest::Approx(std::log2(1.0 + num / (interference + sigma2))).epsilon(1e-12));
}

TEST_CASE("fully loaded ZF keeps the 1/(M_l N) array-gain factor") {
  SimConfig cfg;
  cfg.num_aps = 1;
  cfg.num_seus = 1;
  cfg.num_ues = 2;
  cfg.antennas_per_ap = 2;
  cfg.num_pilots = 2;
  cfg.selection_threshold_db = std::numeric_limits<Real>::infinity();
  cfg.noise_power_dbm = -200.0;  // estimation near perfect, eta ~ 0
  cfg.rng_seed = 63;
  const SimInstance inst = build_instance(cfg);

  const SeuBlock& blk = inst.seu[0];
  const Real rho = inst.powers.rho_ul(0);
  const Real sigma2 = inst.powers.sigma2_ul(0);
  const Real s0 = blk.beta.col(0).cwiseAbs2().sum();
  Real interference = 0.0;
  for (int kp = 0; kp < 2; ++kp) interference += rho * 2.0 * blk.eta.col(kp).sum() / 2.0;
  // (M_l N - K_l + 1) / (M_l N) = 1/2 with one 2-antenna AP serving two UEs.
  const Real expect = rho * 0.5 * 2.0 * s0 / (interference + sigma2);
  const Vec rate = rate_zf_closed_form(inst, unit_weights(inst));
  CHECK(rate(0) == doctest::Approx(std::log2(1.0 + std::min(expect, 1e12))).epsilon(1e-12));
}

TEST_CASE("ZF closed form rejects an overloaded SEU") {
  SimConfig cfg;
  cfg.num_aps = 1;
  cfg.num_seus = 1;
  cfg.num_ues = 3;
  cfg.antennas_per_ap = 1;
  cfg.num_pilots = 3;
  cfg.selection_threshold_db = std::numeric_limits<Real>::infinity();
  cfg.rng_seed = 64;
  const SimInstance inst = build_instance(cfg);
  CHECK_THROWS_AS(rate_zf_closed_form(inst, unit_weights(inst)), std::runtime_error);
}

TEST_CASE("Monte Carlo per-draw results are substream stable") {
  const SimInstance inst = copilot_pair_instance();
  const LsfdWeights w = lsfd_weights_plugin_mrc(inst);

  McOptions short_opts;
  short_opts.n_draws = 100;
  short_opts.collect_per_draw = true;
  McOptions long_opts;
  long_opts.n_draws = 200;
  long_opts.collect_per_draw = true;

  const McResult a = rate_monte_carlo(inst, Receiver::Mrc, w, short_opts);
  const McResult b = rate_monte_carlo(inst, Receiver::Mrc, w, long_opts);
  REQUIRE(a.per_draw.rows() == 100);
  REQUIRE(b.per_draw.rows() == 200);
  CHECK(a.per_draw == b.per_draw.topRows(100));

  // Re-running the identical request is bitwise stable.
  const McResult c = rate_monte_carlo(inst, Receiver::Mrc, w, short_opts);
  CHECK(a.rate == c.rate);

  McOptions plain;
  plain.n_draws = 50;
  const McResult d = rate_monte_carlo(inst, Receiver::Mrc, w, plain);
  CHECK(d.per_draw.size() == 0);
  CHECK(d.rate.minCoeff() >= 0.0);
  CHECK(d.rate.allFinite());
}

TEST_CASE("Monte Carlo SINR is invariant to rescaled fusion weights") {
  const SimInstance inst = copilot_pair_instance();
  LsfdWeights w = lsfd_weights_plugin_mrc(inst);
  McOptions opts;
  opts.n_draws = 200;

  const McResult base = rate_monte_carlo(inst, Receiver::Mrc, w, opts);
  w.mu.col(0) *= Complex(1.7, -2.3);
  w.mu.col(1) *= 4.0;
  const McResult scaled = rate_monte_carlo(inst, Receiver::Mrc, w, opts);
  CHECK((base.rate - scaled.rate).cwiseAbs().maxCoeff() <= 1e-9);

  const Vec cf_base = rate_mrc_closed_form(inst, lsfd_weights_plugin_mrc(inst));
  const Vec cf_scaled = rate_mrc_closed_form(inst, w);
  CHECK((cf_base - cf_scaled).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("per-SEU SINR form agrees with the coherent form on one SEU") {
  // With a single serving SEU the fused amplitude has one term, so squaring
  // before or after the sum is the same arithmetic for MRC; for ZF the
  // normalized per-SEU products rebuild the identical ratio.
  const McOptions coh{300, false, 1e12, SinrForm::Coherent};
  const McOptions ps{300, false, 1e12, SinrForm::PerSeu};

  const SimInstance mrc_inst = copilot_pair_instance();
  const LsfdWeights wm = unit_weights(mrc_inst);
  const McResult am = rate_monte_carlo(mrc_inst, Receiver::Mrc, wm, coh);
  const McResult bm = rate_monte_carlo(mrc_inst, Receiver::Mrc, wm, ps);
  CHECK((am.rate - bm.rate).cwiseAbs().maxCoeff() <= 1e-12 * am.rate.cwiseAbs().maxCoeff());

  // Orthogonal pilots keep the co-located pair's estimates independent, so
  // the SEU's ZF matrix stays full rank.
  SimConfig cfg = mrc_inst.config;
  cfg.num_pilots = 2;
  const SimInstance zf_inst = assemble_instance(cfg, mrc_inst.layout);
  const LsfdWeights wz = unit_weights(zf_inst);
  const McResult az = rate_monte_carlo(zf_inst, Receiver::Zf, wz, coh);
  const McResult bz = rate_monte_carlo(zf_inst, Receiver::Zf, wz, ps);
  CHECK((az.rate - bz.rate).cwiseAbs().maxCoeff() <= 1e-12 * az.rate.cwiseAbs().maxCoeff());
}

TEST_CASE("per-SEU SINR form is invariant to rescaled fusion weights") {
  const SimInstance inst = copilot_pair_instance();
  LsfdWeights w = lsfd_weights_plugin_mrc(inst);
  McOptions opts;
  opts.n_draws = 200;
  opts.form = SinrForm::PerSeu;

  const McResult base = rate_monte_carlo(inst, Receiver::Mrc, w, opts);
  w.mu.col(0) *= Complex(0.0, -3.0);
  w.mu.col(1) *= 0.25;
  const McResult scaled = rate_monte_carlo(inst, Receiver::Mrc, w, opts);
  CHECK((base.rate - scaled.rate).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("single-link Monte Carlo converges to the closed form") {
  // One UE, one AP: the coherent bound and the closed form describe the same
  // scalar channel, so the Monte Carlo mean lands on the closed form up to
  // a small Jensen correction.
  const SimInstance inst = single_link_instance(8, -84.0);
  const LsfdWeights w = unit_weights(inst);
  McOptions opts;
  opts.n_draws = 4000;
  // The acceptance-style tolerance: the coherent sample mean sits a Jensen
  // correction of about 1/(2N ln 2) bits under the moment-based form.
  auto close = [](Real mc, Real cf) { return std::abs(mc - cf) <= std::max(0.05 * cf, 0.1); };

  const McResult mc = rate_monte_carlo(inst, Receiver::Mrc, w, opts);
  const Vec cf = rate_mrc_closed_form(inst, w);
  CHECK(close(mc.rate(0), cf(0)));

  const McResult mz = rate_monte_carlo(inst, Receiver::Zf, w, opts);
  const Vec cz = rate_zf_closed_form(inst, w);
  CHECK(close(mz.rate(0), cz(0)));
  CHECK(mz.max_zf_residual <= 1e-10);
}

TEST_SUITE_END();
