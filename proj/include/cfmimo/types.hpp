// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>

namespace cfmimo {

template <typename Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using CMatX = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using CVecX = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

using Real = double;
using Complex = std::complex<Real>;
using Mat = MatX<Real>;
using Vec = VecX<Real>;
using CMat = CMatX<Real>;
using CVec = CVecX<Real>;

// Binary selection matrices (entries 0/1).
using BinMat = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;
using BinVec = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, 1>;

using Vec2 = Eigen::Matrix<Real, 2, 1>;

template <typename Scalar>
constexpr Scalar db_to_linear(Scalar db) {
  return std::pow(Scalar(10), db / Scalar(10));
}

template <typename Scalar>
constexpr Scalar linear_to_db(Scalar lin) {
  return Scalar(10) * std::log10(lin);
}

// dBm referenced to 1 mW; all linear powers in this library are in mW.
template <typename Scalar>
constexpr Scalar dbm_to_mw(Scalar dbm) {
  return db_to_linear(dbm);
}

}  // namespace cfmimo
