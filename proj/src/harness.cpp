// SPDX-License-Identifier: Apache-2.0
#include "cfmimo/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace cfmimo {

std::string to_string(Architecture a) {
  switch (a) {
    case Architecture::MultiLevel: return "multi_level";
    case Architecture::OriginalCellfree: return "original_cellfree";
    case Architecture::FullyDistributed: return "fully_distributed";
  }
  throw std::logic_error("unreachable architecture");
}

Architecture architecture_from_string(const std::string& name) {
  if (name == "multi_level") return Architecture::MultiLevel;
  if (name == "original_cellfree") return Architecture::OriginalCellfree;
  if (name == "fully_distributed") return Architecture::FullyDistributed;
  throw std::invalid_argument("unknown architecture '" + name + "'");
}

SimConfig effective_config(const SimConfig& base, Architecture arch) {
  SimConfig cfg = base;
  switch (arch) {
    case Architecture::MultiLevel:
      break;
    case Architecture::OriginalCellfree:
      cfg.num_seus = 1;
      cfg.selection_threshold_db = std::numeric_limits<Real>::infinity();
      cfg.noise_power_dbm_per_seu.clear();
      break;
    case Architecture::FullyDistributed:
      cfg.num_seus = cfg.num_aps;
      cfg.noise_power_dbm_per_seu.clear();
      break;
  }
  cfg.validate();
  return cfg;
}

SimInstance build_arch_instance(const SimConfig& base, Architecture arch,
                                std::uint64_t layout_index) {
  const SimConfig cfg = effective_config(base, arch);
  Layout layout = generate_layout(cfg, layout_index);
  if (arch == Architecture::FullyDistributed) {
    layout.seu_positions = layout.ap_positions;
    for (int m = 0; m < layout.num_aps(); ++m) layout.ap_to_seu(m) = m;
  }
  return assemble_instance(cfg, std::move(layout));
}

Vec cdf_quantiles(const Vec& values) {
  if (values.size() == 0) throw std::invalid_argument("cdf_quantiles: empty sample");
  std::vector<Real> sorted(values.data(), values.data() + values.size());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<std::size_t>(sorted.size());
  Vec cdf(101);
  for (int qi = 0; qi <= 100; ++qi) {
    const Real q = qi / 100.0;
    const auto rank = static_cast<std::size_t>(std::ceil(q * n));
    cdf(qi) = sorted[std::max<std::size_t>(rank, 1) - 1];
  }
  return cdf;
}

ExperimentResult run_experiment(const Scenario& scenario) {
  const SimConfig cfg = effective_config(scenario.config, scenario.architecture);
  const std::string fingerprint = cfg.fingerprint();

  ExperimentResult result;
  const int k = cfg.num_ues;
  const int n_layouts = scenario.n_layout_realizations;
  result.pooled_mc.resize(static_cast<Eigen::Index>(k) * n_layouts);
  result.pooled_cf.resize(static_cast<Eigen::Index>(k) * n_layouts);

  for (int li = 0; li < n_layouts; ++li) {
    SimInstance inst;
    try {
      inst = build_arch_instance(scenario.config, scenario.architecture,
                                 static_cast<std::uint64_t>(li));
    } catch (const std::exception& e) {
      throw std::runtime_error("layout " + std::to_string(li) + ": " + e.what());
    }
    try {
      const LsfdWeights weights =
          lsfd_weights(inst, scenario.receiver, scenario.n_moment_samples);
      RateReport report;
      report.receiver = scenario.receiver;
      report.draws = scenario.n_channel_draws;
      report.seed = inst.master_seed();
      report.fingerprint = fingerprint;
      report.rate_cf = scenario.receiver == Receiver::Mrc
                           ? rate_mrc_closed_form(inst, weights, scenario.mrc_scaling)
                           : rate_zf_closed_form(inst, weights);
      McOptions opts;
      opts.n_draws = scenario.n_channel_draws;
      const McResult mc = rate_monte_carlo(inst, scenario.receiver, weights, opts);
      report.rate_mc = mc.rate;
      result.pooled_mc.segment(static_cast<Eigen::Index>(li) * k, k) = report.rate_mc;
      result.pooled_cf.segment(static_cast<Eigen::Index>(li) * k, k) = report.rate_cf;
      result.reports.push_back(std::move(report));
    } catch (const std::exception& e) {
      throw std::runtime_error("layout " + std::to_string(li) + " (seed " +
                               std::to_string(inst.master_seed()) + "): " + e.what());
    }
  }
  result.cdf = cdf_quantiles(result.pooled_mc);
  return result;
}

namespace {

std::string fmt_real(Real v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

}  // namespace

void write_rates_csv(const std::string& path, const std::vector<RateReport>& reports) {
  auto out = open_out(path);
  out << "ue_index,rate_mc,rate_cf,receiver,draws,seed\n";
  for (const RateReport& r : reports)
    for (Eigen::Index kk = 0; kk < r.rate_mc.size(); ++kk)
      out << kk << ',' << fmt_real(r.rate_mc(kk)) << ',' << fmt_real(r.rate_cf(kk)) << ','
          << to_string(r.receiver) << ',' << r.draws << ',' << r.seed << '\n';
}

void write_cdf_csv(const std::string& path, const Vec& cdf) {
  if (cdf.size() != 101) throw std::invalid_argument("write_cdf_csv: expected 101 quantiles");
  auto out = open_out(path);
  out << "quantile,rate_bps_hz\n";
  for (int qi = 0; qi <= 100; ++qi) {
    char q[8];
    std::snprintf(q, sizeof(q), "%.2f", qi / 100.0);
    out << q << ',' << fmt_real(cdf(qi)) << '\n';
  }
}

void write_cluster_plan_csv(const std::string& path, const SimInstance& inst) {
  auto out = open_out(path);
  out << "ap_index,seu_index,served_ues\n";
  for (int m = 0; m < inst.num_aps(); ++m) {
    out << m << ',' << inst.layout.ap_to_seu(m) << ',';
    bool first = true;
    for (int kk = 0; kk < inst.num_ues(); ++kk)
      if (inst.clustering.omega(m, kk)) {
        if (!first) out << ';';
        out << kk;
        first = false;
      }
    out << '\n';
  }
}

SimConfig desk_config(int antennas_per_ap) {
  SimConfig cfg;
  cfg.area_radius_m = 1000.0;
  cfg.num_aps = 64;
  cfg.num_seus = 4;
  cfg.num_ues = 16;
  cfg.antennas_per_ap = antennas_per_ap;
  cfg.min_access_distance_m = 30.0;
  cfg.pathloss_exponent = 3.7;
  cfg.pathloss_constant = 1.0;
  cfg.shadowing_sigma_db = 0.0;
  cfg.ul_power_dbm = 15.0;
  cfg.pilot_power_dbm = 15.0;
  cfg.noise_power_dbm = -84.0;
  cfg.num_pilots = 8;
  cfg.selection_threshold_db = 20.0;
  cfg.rng_seed = 7;
  return cfg;
}

SimConfig paper_config() {
  SimConfig cfg = desk_config();
  cfg.num_aps = 256;
  cfg.num_ues = 32;
  return cfg;
}

}  // namespace cfmimo
