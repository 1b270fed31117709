#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gssc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using BoolMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Cluster label per column, values in [0, K).
using Labels = std::vector<int>;

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Data for which automatic parameter selection is undefined (e.g. mutually
/// orthogonal columns). Callers must supply explicit regularization weights.
class DegenerateInput : public Error {
public:
    using Error::Error;
};

/// A linear solve or factorization produced an unusable result.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// splitmix64 finalizer; used everywhere a child seed is derived from a parent.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Derive an independent stream seed from (parent, stream id).
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream) noexcept {
    return splitmix64(parent ^ splitmix64(stream));
}

}  // namespace gssc
