#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

// Core vocabulary shared by every module: the base field of the matrix group,
// matrix aliases, seeding, Monte Carlo estimates and the error taxonomy.

namespace glwalk {

inline constexpr const char* kVersion = GLWALK_VERSION;

enum class Field { Real, Complex };

// Dimension of the field over the reals; shows up in the half-sum weights.
inline constexpr int field_dim(Field f) { return f == Field::Real ? 1 : 2; }

inline const char* field_name(Field f) { return f == Field::Real ? "real" : "complex"; }

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using RealMatrix = Matrix<double>;
using ComplexMatrix = Matrix<std::complex<double>>;
using Vector = Eigen::VectorXd;
using IndexVector = Eigen::VectorXi;

// Numerical guard rails used across modules.
inline constexpr double kUnitaryTolPerDim = 1e-12;  // unitarity residual: 1e-12 * n
inline constexpr double kDetFloor = 1e-150;         // |det| below this is "singular"
inline constexpr double kCoefTol = 1e-12;           // clamp window for minor coefficients
inline constexpr double kRankRelTol = 1e-8;         // eigenvalue cut for numerical rank

// --- error taxonomy -------------------------------------------------------

// A positive-definiteness factorization did not go through.
struct FactorizationFailure : std::runtime_error {
  explicit FactorizationFailure(const std::string& what) : std::runtime_error(what) {}
};

// Input matrix is numerically singular where invertibility is required.
struct SingularInput : std::runtime_error {
  explicit SingularInput(const std::string& what) : std::runtime_error(what) {}
};

// An integrand produced a non-finite value; message carries sample context.
struct NonFiniteIntegrand : std::runtime_error {
  explicit NonFiniteIntegrand(const std::string& what) : std::runtime_error(what) {}
};

// Malformed configuration (measure JSON, grids, flags).
struct SpecError : std::runtime_error {
  explicit SpecError(const std::string& what) : std::runtime_error(what) {}
};

// The renormalized walk representation lost finiteness.
struct NumericalBlowup : std::runtime_error {
  explicit NumericalBlowup(const std::string& what) : std::runtime_error(what) {}
};

// --- seeding ---------------------------------------------------------------

// Splittable seed: (value, stream) selects an independent generator; derived
// streams are obtained by mixing a salt into the stream component, so worker
// i and subsystem s get reproducible, non-overlapping randomness.
struct Seed {
  std::uint64_t value = 0;
  std::uint64_t stream = 0;
};

// --- Monte Carlo estimates ---------------------------------------------------

// Mean plus standard error (sample sd / sqrt(count)) of a Monte Carlo mean.
template <typename T>
struct Estimate {
  T mean{};
  double std_error = 0.0;
  std::int64_t samples = 0;
};

using MCEstimate = Estimate<double>;
using MCEstimateC = Estimate<std::complex<double>>;

}  // namespace glwalk
