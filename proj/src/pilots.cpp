// SPDX-License-Identifier: Apache-2.0
#include "cfmimo/pilots.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "cfmimo/rng.hpp"

namespace cfmimo {
namespace {

PilotAssignment finish(Eigen::VectorXi pilot_of_ue, int num_pilots) {
  PilotAssignment pa;
  pa.num_pilots = num_pilots;
  pa.cohort.assign(num_pilots, {});
  for (int k = 0; k < pilot_of_ue.size(); ++k) {
    const int t = pilot_of_ue(k);
    if (t < 0 || t >= num_pilots) throw std::invalid_argument("pilots: index out of range");
    pa.cohort[t].push_back(k);
  }
  pa.pilot_of_ue = std::move(pilot_of_ue);
  return pa;
}

}  // namespace

PilotAssignment assign_round_robin(int num_ues, int num_pilots) {
  Eigen::VectorXi p(num_ues);
  for (int k = 0; k < num_ues; ++k) p(k) = k % num_pilots;
  return finish(std::move(p), num_pilots);
}

PilotAssignment assign_random(int num_ues, int num_pilots, std::uint64_t master_seed) {
  std::vector<int> deck(num_ues);
  for (int k = 0; k < num_ues; ++k) deck[k] = k % num_pilots;
  auto rng = RngStream::substream(master_seed, StreamPurpose::PilotAssignment);
  // Fisher-Yates on top of the rate-limited uniform stream keeps the result
  // identical across platforms (std::shuffle's draw pattern is unspecified).
  for (int i = num_ues - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.uniform() * (i + 1));
    std::swap(deck[i], deck[std::min(j, i)]);
  }
  Eigen::VectorXi p(num_ues);
  for (int k = 0; k < num_ues; ++k) p(k) = deck[k];
  return finish(std::move(p), num_pilots);
}

PilotAssignment assign_farthest_first(const MatX<Real>& ue_positions, int num_pilots) {
  const int num_ues = static_cast<int>(ue_positions.rows());
  const int cap = (num_ues + num_pilots - 1) / num_pilots;
  std::vector<std::vector<int>> holders(num_pilots);
  Eigen::VectorXi p(num_ues);
  for (int k = 0; k < num_ues; ++k) {
    int best_pilot = -1;
    Real best_score = -1.0;
    for (int t = 0; t < num_pilots; ++t) {
      if (static_cast<int>(holders[t].size()) >= cap) continue;
      Real score = std::numeric_limits<Real>::infinity();
      for (int u : holders[t])
        score = std::min(score, (ue_positions.row(k) - ue_positions.row(u)).norm());
      if (score > best_score) {
        best_score = score;
        best_pilot = t;
      }
    }
    if (best_pilot < 0) throw std::logic_error("pilots: farthest-first ran out of capacity");
    p(k) = best_pilot;
    holders[best_pilot].push_back(k);
  }
  return finish(std::move(p), num_pilots);
}

PilotAssignment assign_pilots(const SimConfig& config, const Layout& layout) {
  switch (config.pilot_policy) {
    case PilotPolicy::RoundRobin:
      return assign_round_robin(layout.num_ues(), config.num_pilots);
    case PilotPolicy::Random:
      return assign_random(layout.num_ues(), config.num_pilots, layout.master_seed);
    case PilotPolicy::FarthestFirst:
      return assign_farthest_first(layout.ue_positions, config.num_pilots);
  }
  throw std::logic_error("unreachable pilot policy");
}

}  // namespace cfmimo
