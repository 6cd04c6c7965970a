#pragma once

#include <Eigen/Dense>

#include <cstdint>

namespace batchbald {

using Scalar = double;
using Index = Eigen::Index;

using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
// Row-major where the file payload or the (sample, class) slice layout demands it.
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using IntVector = Eigen::Matrix<Index, Eigen::Dynamic, 1>;
using IntMatrix = Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Probabilities are clamped here before they end up in a denominator or a log.
inline constexpr Scalar kTinyProb = 1e-300;

// Tensor rows must sum to 1 within this.
inline constexpr Scalar kNormTol = 1e-9;

// Joint entropies are exact while c^n stays within this; sampled beyond.
inline constexpr Index kDefaultExactLimit = 10000;

// Configuration sample count for the Monte-Carlo joint-entropy estimator.
inline constexpr Index kDefaultConfigSamples = 10000;

}  // namespace batchbald
