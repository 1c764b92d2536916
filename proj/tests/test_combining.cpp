// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "cfmimo/combining.hpp"

using namespace cfmimo;

namespace {

// Two APs / one SEU / two UEs; an infinite window makes everything served.
SimInstance full_service_instance(int antennas_per_ap = 2, int num_pilots = 2) {
  SimConfig cfg;
  cfg.num_aps = 2;
  cfg.num_seus = 1;
  cfg.num_ues = 2;
  cfg.antennas_per_ap = antennas_per_ap;
  cfg.num_pilots = num_pilots;
  cfg.selection_threshold_db = std::numeric_limits<Real>::infinity();
  cfg.rng_seed = 33;

  Layout layout;
  layout.master_seed = 404;
  layout.ap_positions.resize(2, 2);
  layout.ap_positions << 0.0, 0.0, 400.0, 0.0;
  layout.seu_positions = MatX<Real>::Zero(1, 2);
  layout.ue_positions.resize(2, 2);
  layout.ue_positions << 50.0, 0.0, 350.0, 0.0;
  recompute_large_scale(layout, cfg);
  return assemble_instance(cfg, layout);
}

SimInstance two_seu_instance() {
  SimConfig cfg;
  cfg.num_aps = 2;
  cfg.num_seus = 2;
  cfg.num_ues = 3;
  cfg.antennas_per_ap = 2;
  cfg.num_pilots = 3;
  cfg.selection_threshold_db = 20.0;
  cfg.rng_seed = 34;

  Layout layout;
  layout.master_seed = 505;
  layout.ap_positions.resize(2, 2);
  layout.ap_positions << -300.0, 0.0, 300.0, 0.0;
  layout.seu_positions = layout.ap_positions;
  layout.ue_positions.resize(3, 2);
  layout.ue_positions << -310.0, 0.0,  // close to AP 0 only
      310.0, 0.0,                      // close to AP 1 only
      0.0, 0.0;                        // equidistant, served by both
  recompute_large_scale(layout, cfg);
  return assemble_instance(cfg, layout);
}

}  // namespace

TEST_SUITE_BEGIN("combining");

TEST_CASE("MRC combiner is the masked estimate") {
  const SimInstance inst = full_service_instance();
  ChannelDraw d;
  draw_channel(inst, StreamPurpose::RateDraws, 0, d);
  CombinerSet comb;
  make_combiners(inst, d, Receiver::Mrc, comb);
  CHECK(comb.kind == Receiver::Mrc);
  CHECK(comb.w[0] == d.est_masked[0]);
  // The matched-filter self product is a real, non-negative norm.
  const Complex self = comb.w[0].col(0).dot(d.est_masked[0].col(0));
  CHECK(self.imag() == doctest::Approx(0.0));
  CHECK(self.real() > 0.0);
}

TEST_CASE("ZF reproduces the hand-solved 2x2 pseudo-inverse") {
  const SimInstance inst = full_service_instance();
  ChannelDraw d;
  draw_channel(inst, StreamPurpose::RateDraws, 0, d);
  // Overwrite the estimates with an upper-triangular pair: gbar_0 = e0,
  // gbar_1 = e0 + e1. The dual basis is w_0 = e0 - e1, w_1 = e1.
  d.est_masked[0].setZero();
  d.est_masked[0](0, 0) = 1.0;
  d.est_masked[0](0, 1) = 1.0;
  d.est_masked[0](1, 1) = 1.0;

  CombinerSet comb;
  zf_combiners(inst, d, comb);
  CHECK(comb.max_residual <= 1e-12);
  CHECK(std::abs(comb.w[0](0, 0) - Complex(1, 0)) <= 1e-12);
  CHECK(std::abs(comb.w[0](1, 0) - Complex(-1, 0)) <= 1e-12);
  CHECK(std::abs(comb.w[0](2, 0)) <= 1e-12);
  CHECK(std::abs(comb.w[0](0, 1)) <= 1e-12);
  CHECK(std::abs(comb.w[0](1, 1) - Complex(1, 0)) <= 1e-12);
}

TEST_CASE("ZF is orthonormal against the served estimates") {
  const SimInstance inst = full_service_instance(4, 1);  // co-pilot UEs, 8 rows
  ChannelDraw d;
  CombinerSet comb;
  for (int i = 0; i < 50; ++i) {
    draw_channel(inst, StreamPurpose::RateDraws, i, d);
    zf_combiners(inst, d, comb);
    CHECK(comb.max_residual <= 1e-10);
    const CMat gram = comb.w[0].adjoint() * d.est_masked[0];
    CHECK((gram - CMat::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("ZF with a single served UE is the normalized matched filter") {
  SimConfig cfg;
  cfg.num_aps = 2;
  cfg.num_seus = 1;
  cfg.num_ues = 1;
  cfg.antennas_per_ap = 2;
  cfg.num_pilots = 1;
  cfg.rng_seed = 35;
  const SimInstance inst = build_instance(cfg);

  ChannelDraw d;
  draw_channel(inst, StreamPurpose::RateDraws, 4, d);
  CombinerSet comb;
  zf_combiners(inst, d, comb);
  const CVec expect = d.est_masked[0].col(0) / d.est_masked[0].col(0).squaredNorm();
  CHECK((comb.w[0].col(0) - expect).cwiseAbs().maxCoeff() <=
        1e-12 * expect.cwiseAbs().maxCoeff());
}

TEST_CASE("ZF refuses more served UEs than antennas, naming the SEU") {
  SimConfig cfg;
  cfg.num_aps = 1;
  cfg.num_seus = 1;
  cfg.num_ues = 2;
  cfg.antennas_per_ap = 1;
  cfg.num_pilots = 2;
  cfg.selection_threshold_db = std::numeric_limits<Real>::infinity();
  cfg.rng_seed = 36;
  const SimInstance inst = build_instance(cfg);

  ChannelDraw d;
  draw_channel(inst, StreamPurpose::RateDraws, 0, d);
  CombinerSet comb;
  try {
    zf_combiners(inst, d, comb);
    FAIL("expected a throw");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("SEU 0") != std::string::npos);
  }
}

TEST_CASE("draw products carry the exact decomposition") {
  const SimInstance inst = two_seu_instance();
  ChannelDraw d;
  draw_channel(inst, StreamPurpose::RateDraws, 2, d);
  CombinerSet comb;
  make_combiners(inst, d, Receiver::Mrc, comb);
  DrawProducts prod;
  draw_products(inst, d, comb, prod);

  for (int l = 0; l < 2; ++l) {
    const CMat err = comb.w[l].adjoint() * (d.g_true[l] - d.est_full[l]);
    const CMat diff = (prod.tru[l] - prod.est[l]) - err;
    CHECK(diff.cwiseAbs().maxCoeff() <= 1e-12);
    for (int k = 0; k < 3; ++k)
      CHECK(prod.w_norm2(l, k) == doctest::Approx(comb.w[l].col(k).squaredNorm()));
  }
}

TEST_CASE("local estimates carry sqrt(rho) x through a perfect combiner") {
  const SimInstance inst = full_service_instance();
  ChannelDraw d;
  draw_channel(inst, StreamPurpose::RateDraws, 1, d);
  // Pretend estimation is perfect so ZF inverts the true channel exactly.
  d.est_masked[0] = d.g_true[0];
  CombinerSet comb;
  zf_combiners(inst, d, comb);

  CVec tx(2);
  tx << Complex(1.0, 0.0), Complex(0.0, -1.0);

  // Average the noise away: x_hat - w^H n = sqrt(rho) x exactly per draw.
  RngStream noise(2024);
  CVec acc = CVec::Zero(2);
  const int reps = 20000;
  for (int i = 0; i < reps; ++i) acc += local_estimates(inst, d, comb, tx, noise).row(0).transpose();
  acc /= static_cast<Real>(reps);

  const Real amp = std::sqrt(inst.powers.rho_ul(0));
  // Monte Carlo noise floor: sigma ||w|| / sqrt(reps).
  const Real wmax =
      std::max(comb.w[0].col(0).squaredNorm(), comb.w[0].col(1).squaredNorm());
  const Real tol = 6.0 * std::sqrt(inst.powers.sigma2_ul(0) * wmax / reps);
  CHECK(std::abs(acc(0) - amp * tx(0)) <= tol);
  CHECK(std::abs(acc(1) - amp * tx(1)) <= tol);
}

TEST_CASE("noise-only local estimates have power sigma^2 ||w||^2") {
  const SimInstance inst = full_service_instance();
  ChannelDraw d;
  draw_channel(inst, StreamPurpose::RateDraws, 6, d);
  CombinerSet comb;
  make_combiners(inst, d, Receiver::Mrc, comb);

  const CVec tx = CVec::Zero(2);
  RngStream noise(77);
  Real acc = 0.0;
  const int reps = 50000;
  for (int i = 0; i < reps; ++i) acc += std::norm(local_estimates(inst, d, comb, tx, noise)(0, 0));
  acc /= static_cast<Real>(reps);

  const Real expect = inst.powers.sigma2_ul(0) * comb.w[0].col(0).squaredNorm();
  CHECK(acc == doctest::Approx(expect).epsilon(0.03));
}

TEST_CASE("cpu_fuse applies conjugated weights") {
  LsfdWeights w;
  w.mu.resize(2, 2);
  w.mu << Complex(1.0, 1.0), Complex(0.0, 0.0), Complex(2.0, 0.0), Complex(0.0, -3.0);
  CMat locals(2, 2);
  locals << Complex(1.0, 0.0), Complex(5.0, 0.0), Complex(0.0, 1.0), Complex(1.0, 1.0);

  const CVec fused = cpu_fuse(w, locals);
  // conj(1+i) * 1 + conj(2) * i = 1 - i + 2i = 1 + i
  CHECK(std::abs(fused(0) - Complex(1.0, 1.0)) <= 1e-15);
  // conj(0) * 5 + conj(-3i) * (1+i) = 3i * (1+i) = -3 + 3i
  CHECK(std::abs(fused(1) - Complex(-3.0, 3.0)) <= 1e-15);
}

TEST_CASE("LSFD gives a positive real weight in the single-SEU case") {
  const SimInstance inst = full_service_instance();
  const LsfdWeights w = lsfd_weights(inst, Receiver::Mrc, 4000);
  CHECK(w.samples == 4000);
  for (int k = 0; k < 2; ++k) {
    CHECK(w.mu(0, k).real() > 0.0);
    CHECK(std::abs(w.mu(0, k).imag()) <= 0.05 * w.mu(0, k).real());
  }
}

TEST_CASE("LSFD weights vanish exactly on non-serving SEUs") {
  const SimInstance inst = two_seu_instance();
  REQUIRE(inst.clustering.seu_serves(1, 0) == 0);
  REQUIRE(inst.clustering.seu_serves(0, 1) == 0);

  const LsfdWeights emp = lsfd_weights(inst, Receiver::Mrc, 1000);
  CHECK(emp.mu(1, 0) == Complex(0.0, 0.0));
  CHECK(emp.mu(0, 1) == Complex(0.0, 0.0));

  const LsfdWeights plug = lsfd_weights_plugin_mrc(inst);
  CHECK(plug.plug_in);
  CHECK(plug.mu(1, 0) == Complex(0.0, 0.0));
  CHECK(plug.mu(0, 1) == Complex(0.0, 0.0));

  const LsfdWeights zf = lsfd_weights(inst, Receiver::Zf, 1000);
  CHECK(zf.mu(1, 0) == Complex(0.0, 0.0));
  CHECK(zf.mu(0, 1) == Complex(0.0, 0.0));
}

TEST_CASE("plug-in LSFD weights are symmetric for a symmetric UE") {
  const SimInstance inst = two_seu_instance();
  // UE 2 sits exactly between two identical AP/SEU pairs.
  const LsfdWeights plug = lsfd_weights_plugin_mrc(inst);
  CHECK(plug.mu(0, 2).real() == doctest::Approx(plug.mu(1, 2).real()).epsilon(1e-10));
  CHECK(std::abs(plug.mu(0, 2).imag()) <= 1e-14);
}

TEST_CASE("empirical LSFD converges to the plug-in weights for MRC") {
  const SimInstance inst = two_seu_instance();
  const LsfdWeights plug = lsfd_weights_plugin_mrc(inst);
  const LsfdWeights emp = lsfd_weights(inst, Receiver::Mrc, 40000);

  for (int k = 0; k < 3; ++k) {
    const Real scale = plug.mu.col(k).cwiseAbs().maxCoeff();
    for (int l = 0; l < 2; ++l) {
      if (std::abs(plug.mu(l, k)) < 1e-3 * scale) continue;
      CHECK(std::abs(emp.mu(l, k) - plug.mu(l, k)) <= 0.08 * std::abs(plug.mu(l, k)));
    }
  }
}

TEST_SUITE_END();
