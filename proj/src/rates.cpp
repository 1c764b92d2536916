// SPDX-License-Identifier: Apache-2.0
#include "cfmimo/rates.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "cfmimo/parallel.hpp"

namespace cfmimo {

GammaParams gamma_match_estimate(const Vec& ups_beta_sq, int n_antennas) {
  const Real s = ups_beta_sq.sum();
  const Real p2 = ups_beta_sq.squaredNorm();
  if (s <= 0.0 || p2 <= 0.0)
    throw std::invalid_argument("gamma_match_estimate: all-zero mask");
  return {n_antennas * s * s / p2, p2 / s};
}

MomentTable exact_product_moments(const SimInstance& inst) {
  const int k = inst.num_ues();
  const int num_seus = inst.num_seus();
  const Real n = inst.num_antennas;

  MomentTable mom;
  mom.cross_m1.assign(num_seus, Mat::Zero(k, k));
  mom.cross_m2.assign(num_seus, Mat::Zero(k, k));
  mom.err_m2.assign(num_seus, Mat::Zero(k, k));
  for (int l = 0; l < num_seus; ++l) {
    const SeuBlock& blk = inst.seu[l];
    if (blk.aps.empty()) continue;
    const Mat beta_sq = blk.beta.cwiseAbs2();
    for (int kk = 0; kk < k; ++kk) {
      const Vec mb = blk.mask.col(kk).cwiseProduct(beta_sq.col(kk));  // upsilon beta^2
      mom.err_m2[l].row(kk) = n * (mb.transpose() * blk.eta);
      // independent-estimate second moment; co-pilot entries overwritten below
      mom.cross_m2[l].row(kk) = n * (mb.transpose() * beta_sq);
      const Vec mbk = blk.mask.col(kk).cwiseProduct(blk.beta.col(kk));  // upsilon beta_k
      for (int i : inst.pilots.copilots(kk)) {
        const Vec prod = mbk.cwiseProduct(blk.beta.col(i));
        const Real c = prod.sum();
        mom.cross_m1[l](kk, i) = n * c;
        mom.cross_m2[l](kk, i) = (n * c) * (n * c) + n * prod.squaredNorm();
      }
    }
  }
  return mom;
}

namespace {

constexpr Real kSinrCap = 1e12;

Real capped_rate(Real num, Real den, Real cap = kSinrCap) {
  const Real sinr = den > 0.0 ? std::min(num / den, cap) : (num > 0.0 ? cap : 0.0);
  return std::log2(1.0 + sinr);
}

}  // namespace

Vec rate_mrc_closed_form(const SimInstance& inst, const LsfdWeights& weights,
                         MrcScaling scaling) {
  const int k = inst.num_ues();
  const Real n = inst.num_antennas;
  const bool faithful = scaling == MrcScaling::Consistent;
  const Vec& rho = inst.powers.rho_ul;

  Vec rate(k);
  for (int kk = 0; kk < k; ++kk) {
    Real num = 0.0;
    Real den = 0.0;
    for (int l : inst.clustering.seus_of_ue[kk]) {
      const Real mu2 = std::norm(weights.mu(l, kk));
      if (mu2 == 0.0) continue;
      const SeuBlock& blk = inst.seu[l];
      const Vec mb = blk.mask.col(kk).cwiseProduct(blk.beta.col(kk).cwiseAbs2());
      const Vec mbk = blk.mask.col(kk).cwiseProduct(blk.beta.col(kk));
      const Real s = mb.sum();

      Real i1 = 0.0;
      for (int i : inst.pilots.copilots(kk)) {
        if (i == kk) continue;
        const Real c = mbk.dot(blk.beta.col(i));
        i1 += rho(i) * (faithful ? (n * c) * (n * c) : n * c * c);
      }
      const Vec q_row = blk.beta.cwiseAbs2().transpose() * mb;  // K: sum_m ub^2_k b^2_u
      Real i2 = 0.0;
      for (int u = 0; u < k; ++u)
        if (!inst.pilots.share_pilot(u, kk)) i2 += rho(u) * q_row(u);
      if (faithful) i2 *= n;
      Real i3 = rho.dot(blk.eta.transpose() * mb);
      if (faithful) i3 *= n;
      const Real noise = blk.sigma2_ul * n * s;  // sigma^2 phi theta

      num += mu2 * rho(kk) * (faithful ? (n * s) * (n * s) : n * s * s);
      den += mu2 * (i1 + i2 + i3 + noise);
    }
    rate(kk) = capped_rate(num, den);
  }
  return rate;
}

Vec rate_zf_closed_form(const SimInstance& inst, const LsfdWeights& weights) {
  const int k = inst.num_ues();
  const Real n = inst.num_antennas;
  const Vec& rho = inst.powers.rho_ul;

  Vec rate(k);
  for (int kk = 0; kk < k; ++kk) {
    Real num = 0.0;
    Real den = 0.0;
    for (int l : inst.clustering.seus_of_ue[kk]) {
      const Real mu2 = std::norm(weights.mu(l, kk));
      if (mu2 == 0.0) continue;
      const SeuBlock& blk = inst.seu[l];
      const auto& served = inst.clustering.served_by_seu[l];
      const int kl = static_cast<int>(served.size());
      if (kl > blk.rows)
        throw std::runtime_error("zf closed form: SEU " + std::to_string(l) + " serves " +
                                 std::to_string(kl) + " UEs with only " +
                                 std::to_string(blk.rows) + " antennas");
      const Vec mb = blk.mask.col(kk).cwiseProduct(blk.beta.col(kk).cwiseAbs2());
      const Real phitheta = n * mb.sum();
      const Vec eta_sums = blk.eta.transpose() * blk.mask.col(kk);  // sum_m ups_k eta_k'
      Real interference = 0.0;
      for (int kp : served) interference += rho(kp) * n * eta_sums(kp);  // phi~ theta~
      num += mu2 * rho(kk) * ((blk.rows - kl + 1.0) / blk.rows) * phitheta;
      den += mu2 * (interference / blk.rows + blk.sigma2_ul);
    }
    rate(kk) = capped_rate(num, den);
  }
  return rate;
}

McResult rate_monte_carlo(const SimInstance& inst, Receiver kind, const LsfdWeights& weights,
                          const McOptions& opts) {
  if (opts.n_draws < 1) throw std::invalid_argument("rate_monte_carlo: need n_draws >= 1");
  const int k = inst.num_ues();
  const Vec& rho = inst.powers.rho_ul;

  Mat per_draw(opts.n_draws, k);
  Vec residual = Vec::Zero(opts.n_draws);

  struct Workspace {
    ChannelDraw draw;
    CombinerSet comb;
    DrawProducts prod;
    CVec a, e;
  };
  const int threads = default_thread_count();
  std::vector<Workspace> ws(threads);

  parallel_for(opts.n_draws, [&](int worker, std::int64_t d) {
    Workspace& w = ws[worker];
    draw_channel(inst, StreamPurpose::RateDraws, static_cast<std::uint64_t>(d), w.draw);
    make_combiners(inst, w.draw, kind, w.comb);
    draw_products(inst, w.draw, w.comb, w.prod);
    residual(d) = w.comb.max_residual;

    w.a.resize(k);
    w.e.resize(k);
    for (int kk = 0; kk < k; ++kk) {
      if (opts.form == SinrForm::PerSeu) {
        Real num = 0.0;
        Real den = 0.0;
        for (int l : inst.clustering.seus_of_ue[kk]) {
          const Real mu2 = std::norm(weights.mu(l, kk));
          if (mu2 == 0.0) continue;
          const Real wn2 = w.prod.w_norm2(l, kk);
          const auto& est = w.prod.est[l];
          const auto& tru = w.prod.tru[l];
          Real interf = 0.0;
          if (kind == Receiver::Zf) {
            // Unit-norm combiner: w^H ghat_k == 1 by construction, interference
            // only from the estimation errors of the UEs this SEU serves.
            for (int i : inst.clustering.served_by_seu[l])
              interf += rho(i) * std::norm(tru(kk, i) - est(kk, i));
            const Real inv = 1.0 / wn2;
            num += mu2 * inv;
            den += mu2 * (interf * inv + inst.seu[l].sigma2_ul);
          } else {
            for (int i = 0; i < k; ++i) {
              if (i != kk) interf += rho(i) * std::norm(est(kk, i));
              interf += rho(i) * std::norm(tru(kk, i) - est(kk, i));
            }
            num += mu2 * std::norm(est(kk, kk));
            den += mu2 * (interf + inst.seu[l].sigma2_ul * wn2);
          }
        }
        per_draw(d, kk) = capped_rate(rho(kk) * num, den, opts.sinr_cap);
        continue;
      }
      w.a.setZero();
      w.e.setZero();
      Real noise = 0.0;
      for (int l : inst.clustering.seus_of_ue[kk]) {
        const Complex mu = std::conj(weights.mu(l, kk));
        if (mu == Complex(0)) continue;
        w.a += mu * w.prod.est[l].row(kk).transpose();
        w.e += mu * (w.prod.tru[l].row(kk) - w.prod.est[l].row(kk)).transpose();
        noise += std::norm(mu) * inst.seu[l].sigma2_ul * w.prod.w_norm2(l, kk);
      }
      const Real desired = rho(kk) * std::norm(w.a(kk));
      Real den = noise - desired;  // removes the i == kk estimate term added below
      for (int i = 0; i < k; ++i) den += rho(i) * (std::norm(w.a(i)) + std::norm(w.e(i)));
      per_draw(d, kk) = capped_rate(desired, den, opts.sinr_cap);
    }
  }, threads);

  McResult res;
  res.rate = Vec::Zero(k);
  for (int d = 0; d < opts.n_draws; ++d) res.rate += per_draw.row(d).transpose();
  res.rate /= static_cast<Real>(opts.n_draws);
  res.max_zf_residual = residual.maxCoeff();
  if (opts.collect_per_draw) res.per_draw = std::move(per_draw);
  return res;
}

}  // namespace cfmimo
