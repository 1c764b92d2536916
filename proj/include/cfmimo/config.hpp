// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "cfmimo/types.hpp"

namespace cfmimo {

enum class PilotPolicy { RoundRobin, Random, FarthestFirst };

std::string to_string(PilotPolicy policy);
PilotPolicy pilot_policy_from_string(const std::string& name);

// System-level parameters. dB/dBm fields keep their logarithmic units here;
// Powers below carries the linear-scale values the signal model consumes.
struct SimConfig {
  Real area_radius_m = 1000.0;        // R
  int num_aps = 64;                   // M
  int num_seus = 4;                   // L
  int num_ues = 16;                   // K
  int antennas_per_ap = 4;            // N
  Real min_access_distance_m = 30.0;  // r0
  Real pathloss_exponent = 3.7;       // alpha
  Real pathloss_constant = 1.0;       // c, linear
  Real shadowing_sigma_db = 0.0;      // 0 disables shadowing
  Real ul_power_dbm = 15.0;           // rho_k, same for every UE
  Real pilot_power_dbm = 15.0;        // rho_p
  Real noise_power_dbm = -84.0;       // sigma^2 (uplink and pilot)
  int num_pilots = 8;                 // tau
  Real selection_threshold_db = 20.0; // +inf = every AP serves every UE
  std::uint64_t rng_seed = 1;

  PilotPolicy pilot_policy = PilotPolicy::RoundRobin;
  std::optional<int> max_ues_per_ap;                // per-AP load cap, unset = pure threshold rule
  std::map<int, Real> noise_power_dbm_per_seu;      // sparse per-SEU override

  // Throws std::invalid_argument on any violated invariant.
  void validate() const;

  // Stable hash over every field; identical configs hash identically.
  std::string fingerprint() const;
};

// Parses a `key = value` text file. Keys must match SimConfig field names
// exactly (plus `pilot_policy`, `max_ues_per_ap` and
// `noise_power_dbm_seu_<l>`); an unknown key is a hard error.
// `selection_threshold_db` additionally accepts `inf` or `all`.
SimConfig load_config(const std::string& path);
SimConfig parse_config(const std::string& text);

void save_config(const SimConfig& config, const std::string& path);

// Linear-scale (mW) transmit and noise powers, resolved per UE / per SEU.
struct Powers {
  Vec rho_ul;        // K entries
  Real rho_pilot = 0.0;
  Vec sigma2_ul;     // L entries
  Vec sigma2_pilot;  // L entries (same overrides as sigma2_ul)

  Real gamma_pilot(int seu) const { return rho_pilot / sigma2_pilot(seu); }
};

Powers make_powers(const SimConfig& config, int effective_num_seus);

}  // namespace cfmimo
