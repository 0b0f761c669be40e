#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace icode {

// Row-major storage so flattened views, CSV grids and checkpoint arrays all
// share the same linear layout.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Index = Eigen::Index;

// Error taxonomy; the CLI maps these onto exit codes (2/3/4).
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ShapeError : ValidationError {
  explicit ShapeError(const std::string& msg) : ValidationError(msg) {}
};

struct DivergenceError : std::runtime_error {
  explicit DivergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Deterministic seed derivation for independent random streams. FNV-1a over
// the tag, mixed with the base seed through a splitmix64 finalizer.
std::uint64_t derive_seed(std::uint64_t base, const std::string& tag);

}  // namespace icode
