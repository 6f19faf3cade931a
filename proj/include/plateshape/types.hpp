#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace plateshape {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<double>;

// Thrown when a requested computation is well posed but the numerics give out
// (factorization breakdown, non-convergence, inconsistent cross-checks).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A map whose mapped mesh folds over itself (non-positive triangle area).
struct DegenerateMapError : NumericalError {
  using NumericalError::NumericalError;
};

// Finite differencing across an eigenvalue crossing cannot attribute branches.
struct BranchAmbiguityError : NumericalError {
  using NumericalError::NumericalError;
};

// An operation that requires a simple eigenvalue met a cluster of size > 1.
struct NotSimpleError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A cluster whose spread exceeds the clustering tolerance, or a stale index set.
struct InvalidClusterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Atlas-domain operations need both operands built over the same atlas.
struct IncompatibleAtlasError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Chart data that does not describe a valid subgraph domain.
struct InvalidDomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Constrained FE space with zero interior degrees of freedom.
struct EmptySpaceError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Stability ratio |Q2-Q1| / (Q1 * delta) requested for a map with delta = 0.
struct UndefinedRatioError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A parameter outside the validated range of a construction (e.g. eps >= E).
struct OutOfRangeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// 64-bit FNV-1a, used for content hashes in output headers.
inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t seed = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t fnv1a64(const std::string& s,
                             std::uint64_t seed = 0xcbf29ce484222325ull) {
  return fnv1a64(s.data(), s.size(), seed);
}

}  // namespace plateshape
