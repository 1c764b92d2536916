// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "cfmimo/channel.hpp"
#include "cfmimo/combining.hpp"
#include "cfmimo/config.hpp"
#include "cfmimo/rates.hpp"

namespace cfmimo {

enum class Architecture { MultiLevel, OriginalCellfree, FullyDistributed };

std::string to_string(Architecture a);
Architecture architecture_from_string(const std::string& name);

struct Scenario {
  SimConfig config;
  Architecture architecture = Architecture::MultiLevel;
  Receiver receiver = Receiver::Mrc;
  int n_layout_realizations = 1;
  int n_channel_draws = 10000;
  int n_moment_samples = 2000;
  MrcScaling mrc_scaling = MrcScaling::Consistent;
};

// Rewrites the config for a baseline architecture:
//   original_cellfree   — one SEU, infinite selection threshold
//   fully_distributed   — every AP is its own SEU, threshold unchanged
// Per-SEU noise overrides are dropped for the baselines (their indices refer
// to the multi-level SEUs).
SimConfig effective_config(const SimConfig& base, Architecture arch);

// Builds the instance for one layout realization under the architecture
// (fully_distributed co-locates each SEU with its AP).
SimInstance build_arch_instance(const SimConfig& base, Architecture arch,
                                std::uint64_t layout_index = 0);

struct ExperimentResult {
  std::vector<RateReport> reports;  // one per layout realization
  Vec pooled_mc;                    // all per-UE Monte Carlo rates
  Vec pooled_cf;
  Vec cdf;                          // 101 nearest-rank quantiles of pooled_mc
};

ExperimentResult run_experiment(const Scenario& scenario);

// Nearest-rank quantiles on the 0, 0.01, ..., 1.00 grid.
Vec cdf_quantiles(const Vec& values);

void write_rates_csv(const std::string& path, const std::vector<RateReport>& reports);
void write_cdf_csv(const std::string& path, const Vec& cdf);
void write_cluster_plan_csv(const std::string& path, const SimInstance& inst);

// Small deterministic configuration used by validate and the test suites
// (64 APs, 4 SEUs, 16 UEs, 8 pilots, 20 dB threshold, shadowing off).
SimConfig desk_config(int antennas_per_ap = 4);

// The measurement campaign scale (256 APs, 4 SEUs, 32 UEs, 8 pilots).
SimConfig paper_config();

}  // namespace cfmimo
