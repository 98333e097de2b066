#include "gmop/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "gmop/error.hpp"
#include "gmop/rng.hpp"

namespace gmop {

namespace {

double dense_radius(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver did not converge", 0.0);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

// Orthogonal iteration on a small block, with Rayleigh-Ritz extraction so a
// dominant complex pair or a +/- pair of equal modulus still converges.
// Returns a negative value when it has not converged.
double subspace_radius(const Eigen::MatrixXd& m) {
  const Eigen::Index n = m.rows();
  const Eigen::Index p = std::min<Eigen::Index>(n, 8);
  constexpr int kMaxIterations = 3000;
  constexpr double kResidualTol = 1e-11;

  Rng rng = substream(0x5eed, "spectral-radius");
  std::normal_distribution<double> z;
  Eigen::MatrixXd q(n, p);
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = 0; i < n; ++i) q(i, j) = z(rng);
  q = Eigen::HouseholderQR<Eigen::MatrixXd>(q).householderQ() * Eigen::MatrixXd::Identity(n, p);

  for (int it = 0; it < kMaxIterations; ++it) {
    Eigen::MatrixXd mq = m * q;
    if ((it + 1) % 10 == 0) {
      const Eigen::MatrixXd h = q.transpose() * mq;
      Eigen::EigenSolver<Eigen::MatrixXd> es(h);
      if (es.info() == Eigen::Success) {
        Eigen::Index top = 0;
        es.eigenvalues().cwiseAbs().maxCoeff(&top);
        const std::complex<double> lambda = es.eigenvalues()(top);
        const Eigen::VectorXcd v = q.cast<std::complex<double>>() * es.eigenvectors().col(top);
        const Eigen::VectorXcd r = m.cast<std::complex<double>>() * v - lambda * v;
        const double scale = std::max(std::abs(lambda), 1e-300) * v.norm();
        if (r.norm() <= kResidualTol * scale) return std::abs(lambda);
      }
    }
    q = Eigen::HouseholderQR<Eigen::MatrixXd>(mq).householderQ() * Eigen::MatrixXd::Identity(n, p);
  }
  return -1.0;
}

}  // namespace

double spectral_radius(const Eigen::MatrixXd& m, SpectralMethod method) {
  if (m.rows() != m.cols()) throw InvalidParameter("spectral_radius needs a square matrix");
  if (!m.allFinite()) throw InvalidParameter("spectral_radius needs finite entries");
  if (m.rows() == 0) return 0.0;

  if (method == SpectralMethod::Auto) {
    method = static_cast<std::size_t>(m.rows()) <= kDenseSpectralLimit ? SpectralMethod::Dense
                                                                        : SpectralMethod::Subspace;
  }
  if (method == SpectralMethod::Subspace) {
    const double rho = subspace_radius(m);
    if (rho >= 0.0) return rho;
  }
  return dense_radius(m);
}

}  // namespace gmop
