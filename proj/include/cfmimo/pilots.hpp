// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cfmimo/config.hpp"
#include "cfmimo/netgeom.hpp"

namespace cfmimo {

struct PilotAssignment {
  Eigen::VectorXi pilot_of_ue;           // K
  std::vector<std::vector<int>> cohort;  // UEs per pilot, ascending
  int num_pilots = 0;

  // Co-pilot set of `ue`, including `ue` itself.
  const std::vector<int>& copilots(int ue) const { return cohort[pilot_of_ue(ue)]; }
  bool share_pilot(int a, int b) const { return pilot_of_ue(a) == pilot_of_ue(b); }
};

// pilot_of_ue(k) = k mod tau.
PilotAssignment assign_round_robin(int num_ues, int num_pilots);

// Round-robin pilot multiset dealt in a random order, so cohort sizes stay
// balanced (tau == K still yields orthogonal pilots).
PilotAssignment assign_random(int num_ues, int num_pilots, std::uint64_t master_seed);

// Greedy max-min-distance reuse: UEs in index order take the pilot whose
// current holders are farthest away, capped at ceil(K / tau) per pilot;
// ties resolve to the lowest pilot index.
PilotAssignment assign_farthest_first(const MatX<Real>& ue_positions, int num_pilots);

PilotAssignment assign_pilots(const SimConfig& config, const Layout& layout);

}  // namespace cfmimo
