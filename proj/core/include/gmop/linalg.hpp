#pragma once

#include <cstddef>

#include <Eigen/Dense>

namespace gmop {

enum class SpectralMethod {
  Auto,      // dense up to kDenseSpectralLimit, subspace iteration above
  Dense,     // full nonsymmetric eigendecomposition
  Subspace,  // orthogonal (block power) iteration with Rayleigh-Ritz
};

inline constexpr std::size_t kDenseSpectralLimit = 512;

/// Largest eigenvalue modulus. Subspace iteration falls back to the dense
/// solver if it has not settled to ~1e-12 relative change.
double spectral_radius(const Eigen::MatrixXd& m, SpectralMethod method = SpectralMethod::Auto);

}  // namespace gmop
