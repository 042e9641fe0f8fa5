#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>

#include <Eigen/Core>

namespace vpk {

/// A fixed-dimension real state. The owning environment defines the meaning
/// and order of the components.
using StateVector = Eigen::VectorXd;

/// Throws std::runtime_error naming `what` if any entry is NaN or infinite.
void RequireFinite(const StateVector& s, const std::string& what);

/// The random engine used everywhere a seed is accepted.
using Rng = std::mt19937_64;

/// Uniform double in [0, 1) with 53 random bits. Implemented by hand so that
/// seeded runs are reproducible across standard libraries.
inline double Uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double UniformIn(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * Uniform01(rng);
}

/// Derives an independent stream seed from a base seed and a stream index
/// (splitmix64 finalizer).
std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t stream);

}  // namespace vpk
