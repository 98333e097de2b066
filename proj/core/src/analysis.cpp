#include "gmop/analysis.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/LU>

#include "gmop/error.hpp"
#include "gmop/linalg.hpp"

namespace gmop {

namespace {

constexpr double kRowSumTol = 1e-12;

void require_sigma_y(double sigma_y) {
  if (!(sigma_y > 0.0) || !std::isfinite(sigma_y)) throw InvalidParameter("sigma_y must be > 0");
}

}  // namespace

double sigma_fixed_point(double nu, double sigma_y) {
  require_sigma_y(sigma_y);
  if (!(nu >= 0.0) || !std::isfinite(nu)) throw InvalidParameter("nu must be >= 0");
  if (nu == 0.0) return 0.0;
  return 0.5 * (nu + std::sqrt(nu * nu + 4.0 * nu * sigma_y));
}

double variance_recursion(double x, double nu, double sigma_y) {
  return x * sigma_y / (x + sigma_y) + nu;
}

double limit_cov_scalar(double sigma_y, double sigma_inf) {
  require_sigma_y(sigma_y);
  if (!(sigma_inf >= 0.0)) throw InvalidParameter("sigma_inf must be >= 0");
  return sigma_y * sigma_inf / (sigma_inf + 2.0 * sigma_y);
}

Eigen::MatrixXd AsymptoticMoments::covariance() const {
  const Eigen::Index n = mean.size();
  return Eigen::MatrixXd::Constant(n, n, cov_scalar);
}

AsymptoticMoments asymptotic_mean_cov(double theta, double sigma_y, double sigma_inf,
                                      std::size_t n) {
  return {Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), theta),
          limit_cov_scalar(sigma_y, sigma_inf)};
}

double verify_covariance_fixed_point(const Eigen::MatrixXd& p, const Eigen::MatrixXd& a,
                                     const Eigen::MatrixXd& b_eff, double sigma_y) {
  const Eigen::Index n = p.rows();
  if (p.cols() != n || a.rows() != n || a.cols() != n || b_eff.rows() != n || b_eff.cols() != n) {
    throw InvalidParameter("verify_covariance_fixed_point: matrices are not conformable");
  }
  const Eigen::VectorXd b1 = b_eff * Eigen::VectorXd::Ones(n);
  const Eigen::MatrixXd next = a * p * a.transpose() + sigma_y * b1 * b1.transpose();
  if (n == 0) return 0.0;
  return (p - next).cwiseAbs().maxCoeff();
}

Eigen::MatrixXd drop_index(const Eigen::MatrixXd& m, Eigen::Index s) {
  const Eigen::Index n = m.rows();
  Eigen::MatrixXd out(n - 1, n - 1);
  for (Eigen::Index i = 0, r = 0; i < n; ++i) {
    if (i == s) continue;
    for (Eigen::Index j = 0, c = 0; j < n; ++j) {
      if (j == s) continue;
      out(r, c++) = m(i, j);
    }
    ++r;
  }
  return out;
}

StubbornEquilibrium stubborn_equilibrium(const SocialGraph& g, const MeanCoupling& coupling,
                                         NodeId stubborn, double mu_dagger, double theta) {
  const std::size_t n = g.size();
  if (stubborn >= n) throw InvalidParameter("stubborn node outside the graph");
  const SystemMatrices sys = build_system_matrices(g, coupling);
  const auto s = static_cast<Eigen::Index>(stubborn);
  const auto m = static_cast<Eigen::Index>(n - 1);

  StubbornEquilibrium eq;
  eq.stubborn = stubborn;
  const Eigen::MatrixXd a_mm = drop_index(sys.A, s);
  eq.block_spectral_radius = spectral_radius(a_mm);
  if (!(eq.block_spectral_radius < 1.0)) {
    throw InstabilityError("rho(A_{-s,-s}) = " + std::to_string(eq.block_spectral_radius) +
                               " >= 1 with node " + std::to_string(stubborn + 1) + " stubborn",
                           eq.block_spectral_radius);
  }

  Eigen::VectorXd rhs(m);
  for (Eigen::Index i = 0, r = 0; i < static_cast<Eigen::Index>(n); ++i) {
    if (i == s) continue;
    eq.malleable.push_back(static_cast<NodeId>(i));
    rhs(r++) = sys.B(i, i) * theta + sys.A(i, s) * mu_dagger;
  }

  const Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(m, m) - a_mm;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(lhs);
  const double rcond = m > 0 ? lu.rcond() : 1.0;
  eq.condition_number = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (!(rcond > 1e-14)) {
    throw NumericalError("I - A_{-s,-s} is singular (condition ~ " +
                             std::to_string(eq.condition_number) + ")",
                         eq.condition_number);
  }
  eq.gamma = m > 0 ? Eigen::VectorXd(lu.solve(rhs)) : Eigen::VectorXd();

  eq.limit_means.resize(static_cast<Eigen::Index>(n));
  eq.limit_means(s) = mu_dagger;
  for (Eigen::Index r = 0; r < m; ++r) {
    eq.limit_means(static_cast<Eigen::Index>(eq.malleable[static_cast<std::size_t>(r)])) =
        eq.gamma(r);
  }
  return eq;
}

double centrality_from_equilibrium(const StubbornEquilibrium& eq, double theta) {
  if (eq.gamma.size() == 0) return 0.0;
  return (eq.gamma.array() - theta).abs().mean();
}

double centrality_score(const SocialGraph& g, const MeanCoupling& coupling, NodeId s,
                        double mu_dagger, double theta) {
  return centrality_from_equilibrium(stubborn_equilibrium(g, coupling, s, mu_dagger, theta), theta);
}

StabilityReport stability_report(const SocialGraph& g, const MeanCoupling& coupling,
                                 std::optional<NodeId> stubborn) {
  StabilityReport rep;
  const SystemMatrices sys = build_system_matrices(g, coupling);
  rep.spectral_radius = spectral_radius(sys.A);
  rep.row_sum_residual = check_row_sum_condition(g);
  rep.row_sum_ok = rep.row_sum_residual <= kRowSumTol;
  rep.mean_convergence_ok = rep.row_sum_ok && rep.spectral_radius < 1.0;
  rep.degenerate_gain = coupling.sigma_inf == 0.0;
  if (stubborn) {
    if (*stubborn >= g.size()) throw InvalidParameter("stubborn node outside the graph");
    rep.block_spectral_radius = spectral_radius(drop_index(sys.A, static_cast<Eigen::Index>(*stubborn)));
    rep.stubborn_convergence_ok = *rep.block_spectral_radius < 1.0;
  }
  return rep;
}

}  // namespace gmop
