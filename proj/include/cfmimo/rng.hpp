// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

#include "cfmimo/types.hpp"

namespace cfmimo {

// One master seed drives the whole experiment. Every consumer derives its own
// substream from (master, purpose, index), so e.g. doubling the Monte Carlo
// draw count never perturbs the layout, and draw #i sees the same stream no
// matter how many workers run.
enum class StreamPurpose : std::uint64_t {
  ApPositions = 1,
  SeuPositions = 2,
  UePositions = 3,
  Shadowing = 4,
  PilotAssignment = 5,
  LsfdMoments = 6,
  RateDraws = 7,
  TxSymbols = 8,
  UplinkNoise = 9,
  LayoutRealization = 10,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t mix_seed(std::uint64_t master, std::uint64_t purpose,
                                 std::uint64_t index = 0) {
  return splitmix64(splitmix64(splitmix64(master) ^ purpose) ^ index);
}

constexpr std::uint64_t mix_seed(std::uint64_t master, StreamPurpose purpose,
                                 std::uint64_t index = 0) {
  return mix_seed(master, static_cast<std::uint64_t>(purpose), index);
}

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  static RngStream substream(std::uint64_t master, StreamPurpose purpose,
                             std::uint64_t index = 0) {
    return RngStream(mix_seed(master, static_cast<std::uint64_t>(purpose), index));
  }

  Real uniform() { return uniform_(engine_); }
  Real normal() { return normal_(engine_); }

  // Circularly symmetric complex Gaussian with unit variance per entry.
  Complex cnormal() {
    static constexpr Real kInvSqrt2 = 0.7071067811865475244;
    const Real re = normal_(engine_);
    const Real im = normal_(engine_);
    return Complex(re * kInvSqrt2, im * kInvSqrt2);
  }

  template <typename Derived>
  void fill_cnormal(Eigen::MatrixBase<Derived>& out) {
    for (Eigen::Index c = 0; c < out.cols(); ++c)
      for (Eigen::Index r = 0; r < out.rows(); ++r) out(r, c) = cnormal();
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<Real> uniform_{0.0, 1.0};
  std::normal_distribution<Real> normal_{0.0, 1.0};
};

}  // namespace cfmimo
