// SPDX-License-Identifier: Apache-2.0
#include "cfmimo/combining.hpp"

#include <Eigen/QR>
#include <cmath>
#include <stdexcept>
#include <string>

#include "cfmimo/rates.hpp"

namespace cfmimo {

std::string to_string(Receiver r) {
  return r == Receiver::Mrc ? "mrc" : "zf";
}

Receiver receiver_from_string(const std::string& name) {
  if (name == "mrc") return Receiver::Mrc;
  if (name == "zf") return Receiver::Zf;
  throw std::invalid_argument("unknown receiver '" + name + "' (expected mrc or zf)");
}

void mrc_combiners(const SimInstance& inst, const ChannelDraw& draw, CombinerSet& out) {
  out.kind = Receiver::Mrc;
  out.max_residual = 0.0;
  out.w.resize(inst.num_seus());
  for (int l = 0; l < inst.num_seus(); ++l) out.w[l] = draw.est_masked[l];
}

void zf_combiners(const SimInstance& inst, const ChannelDraw& draw, CombinerSet& out) {
  out.kind = Receiver::Zf;
  out.max_residual = 0.0;
  out.w.resize(inst.num_seus());
  const int k = inst.num_ues();
  for (int l = 0; l < inst.num_seus(); ++l) {
    const SeuBlock& blk = inst.seu[l];
    const auto& served = inst.clustering.served_by_seu[l];
    const int kl = static_cast<int>(served.size());
    out.w[l].setZero(blk.rows, k);
    if (kl == 0) continue;
    if (kl > blk.rows)
      throw std::runtime_error("zf: SEU " + std::to_string(l) + " serves " + std::to_string(kl) +
                               " UEs with only " + std::to_string(blk.rows) + " antennas");

    CMat gsub(blk.rows, kl);
    for (int j = 0; j < kl; ++j) gsub.col(j) = draw.est_masked[l].col(served[j]);

    Eigen::HouseholderQR<CMat> qr(gsub);
    CMat r = qr.matrixQR().topRows(kl).triangularView<Eigen::Upper>();
    for (int j = 0; j < kl; ++j)
      if (std::abs(r(j, j)) < 1e-12 * std::abs(r(0, 0)) || r(j, j) == Complex(0))
        throw std::runtime_error("zf: rank-deficient estimate matrix at SEU " + std::to_string(l));
    CMat thin_q = qr.householderQ() * CMat::Identity(blk.rows, kl);
    // b = gsub (gsub^H gsub)^{-1} = Q R^{-H}; solve R (b^H) = Q^H instead.
    CMat bh = r.triangularView<Eigen::Upper>().solve(thin_q.adjoint());
    const CMat resid = bh * gsub - CMat::Identity(kl, kl);
    out.max_residual = std::max(out.max_residual, resid.cwiseAbs().maxCoeff());
    for (int j = 0; j < kl; ++j) out.w[l].col(served[j]) = bh.row(j).adjoint();
  }
}

void make_combiners(const SimInstance& inst, const ChannelDraw& draw, Receiver kind,
                    CombinerSet& out) {
  if (kind == Receiver::Mrc)
    mrc_combiners(inst, draw, out);
  else
    zf_combiners(inst, draw, out);
}

void draw_products(const SimInstance& inst, const ChannelDraw& draw, const CombinerSet& comb,
                   DrawProducts& out) {
  const int num_seus = inst.num_seus();
  const int k = inst.num_ues();
  out.est.resize(num_seus);
  out.tru.resize(num_seus);
  out.w_norm2.resize(num_seus, k);
  for (int l = 0; l < num_seus; ++l) {
    out.est[l].noalias() = comb.w[l].adjoint() * draw.est_full[l];
    out.tru[l].noalias() = comb.w[l].adjoint() * draw.g_true[l];
    out.w_norm2.row(l) = comb.w[l].colwise().squaredNorm();
  }
}

CMat local_estimates(const SimInstance& inst, const ChannelDraw& draw, const CombinerSet& comb,
                     const CVec& tx_symbols, RngStream& noise_rng) {
  const int k = inst.num_ues();
  if (tx_symbols.size() != k) throw std::invalid_argument("local_estimates: tx size mismatch");
  CVec scaled = inst.powers.rho_ul.cwiseSqrt().cast<Complex>().cwiseProduct(tx_symbols);
  CMat xhat(inst.num_seus(), k);
  CVec y, noise;
  for (int l = 0; l < inst.num_seus(); ++l) {
    const SeuBlock& blk = inst.seu[l];
    noise.resize(blk.rows);
    noise_rng.fill_cnormal(noise);
    y.noalias() = draw.g_true[l] * scaled;
    y += std::sqrt(blk.sigma2_ul) * noise;
    xhat.row(l) = (comb.w[l].adjoint() * y).transpose();
  }
  return xhat;
}

namespace {

// Solves the per-UE LSFD system given accumulated moments.
CMat solve_weights(const SimInstance& inst, const std::vector<CMat>& psi, const CMat& zmean,
                   const Mat& wnoise) {
  const int num_seus = inst.num_seus();
  const int k = inst.num_ues();
  CMat mu = CMat::Zero(num_seus, k);
  for (int kk = 0; kk < k; ++kk) {
    CMat a = psi[kk];
    for (int l = 0; l < num_seus; ++l) {
      a(l, l) += wnoise(l, kk);
      if (!inst.clustering.seu_serves(l, kk)) a(l, l) += 1.0;  // D_k regularizer
    }
    Eigen::LDLT<CMat> ldlt(a);
    if (ldlt.info() != Eigen::Success)
      throw std::runtime_error("lsfd: singular moment matrix for UE " + std::to_string(kk));
    CVec w = inst.powers.rho_ul(kk) * ldlt.solve(zmean.col(kk));
    for (int l = 0; l < num_seus; ++l)
      mu(l, kk) = inst.clustering.seu_serves(l, kk) ? w(l) : Complex(0);
  }
  return mu;
}

}  // namespace

LsfdWeights lsfd_weights(const SimInstance& inst, Receiver kind, int n_moment_samples) {
  if (n_moment_samples < 1) throw std::invalid_argument("lsfd: need at least one sample");
  const int num_seus = inst.num_seus();
  const int k = inst.num_ues();

  std::vector<CMat> psi(k, CMat::Zero(num_seus, num_seus));
  CMat zmean = CMat::Zero(num_seus, k);
  Mat wacc = Mat::Zero(num_seus, k);
  const CVec rho_c = inst.powers.rho_ul.cast<Complex>();

  ChannelDraw draw;
  CombinerSet comb;
  DrawProducts prod;
  CMat zk(num_seus, k);
  for (int s = 0; s < n_moment_samples; ++s) {
    draw_channel(inst, StreamPurpose::LsfdMoments, static_cast<std::uint64_t>(s), draw);
    make_combiners(inst, draw, kind, comb);
    draw_products(inst, draw, comb, prod);
    for (int kk = 0; kk < k; ++kk) {
      for (int l = 0; l < num_seus; ++l) zk.row(l) = prod.tru[l].row(kk);
      psi[kk].noalias() += zk * rho_c.asDiagonal() * zk.adjoint();
      zmean.col(kk) += zk.col(kk);
    }
    wacc += prod.w_norm2;
  }

  const Real inv_n = 1.0 / n_moment_samples;
  Mat wnoise(num_seus, k);
  for (int l = 0; l < num_seus; ++l)
    wnoise.row(l) = inst.powers.sigma2_ul(l) * inv_n * wacc.row(l);
  for (int kk = 0; kk < k; ++kk) psi[kk] *= inv_n;
  zmean *= inv_n;

  LsfdWeights out;
  out.plug_in = false;
  out.samples = n_moment_samples;
  out.mu = solve_weights(inst, psi, zmean, wnoise);
  return out;
}

LsfdWeights lsfd_weights_plugin_mrc(const SimInstance& inst) {
  const int num_seus = inst.num_seus();
  const int k = inst.num_ues();
  const MomentTable mom = exact_product_moments(inst);

  std::vector<CMat> psi(k, CMat::Zero(num_seus, num_seus));
  CMat zmean = CMat::Zero(num_seus, k);
  Mat wnoise = Mat::Zero(num_seus, k);
  for (int kk = 0; kk < k; ++kk) {
    for (int l = 0; l < num_seus; ++l) {
      Real diag = 0.0;
      for (int i = 0; i < k; ++i)
        diag += inst.powers.rho_ul(i) * (mom.cross_m2[l](kk, i) + mom.err_m2[l](kk, i));
      psi[kk](l, l) = diag;
      // off-diagonal: only co-pilot means survive (independent SEUs)
      for (int lp = 0; lp < l; ++lp) {
        Real off = 0.0;
        for (int i : inst.pilots.copilots(kk))
          off += inst.powers.rho_ul(i) * mom.cross_m1[l](kk, i) * mom.cross_m1[lp](kk, i);
        psi[kk](l, lp) = off;
        psi[kk](lp, l) = off;
      }
      zmean(l, kk) = mom.cross_m1[l](kk, kk);
      wnoise(l, kk) = inst.seu[l].sigma2_ul * mom.cross_m1[l](kk, kk);  // E||w||^2 = N S
    }
  }

  LsfdWeights out;
  out.plug_in = true;
  out.samples = 0;
  out.mu = solve_weights(inst, psi, zmean, wnoise);
  return out;
}

CVec cpu_fuse(const LsfdWeights& weights, const CMat& locals) {
  if (weights.mu.rows() != locals.rows() || weights.mu.cols() != locals.cols())
    throw std::invalid_argument("cpu_fuse: dimension mismatch");
  return (weights.mu.conjugate().cwiseProduct(locals)).colwise().sum().transpose();
}

}  // namespace cfmimo
