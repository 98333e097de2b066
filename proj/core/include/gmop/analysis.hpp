#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "gmop/network.hpp"

namespace gmop {

/// Common limit of all mode variances under a variance bias nu:
/// the positive root of x = x sigma_y / (x + sigma_y) + nu, i.e.
/// (nu + sqrt(nu^2 + 4 nu sigma_y)) / 2. Zero when nu == 0.
double sigma_fixed_point(double nu, double sigma_y);

/// One step of the consensus variance recursion, g(x) = x sigma_y / (x + sigma_y) + nu.
double variance_recursion(double x, double nu, double sigma_y);

/// Coefficient c of the limiting mean covariance c 1 1^T:
/// sigma_y sigma_inf / (sigma_inf + 2 sigma_y).
double limit_cov_scalar(double sigma_y, double sigma_inf);

struct AsymptoticMoments {
  Eigen::VectorXd mean;  // theta on every agent
  double cov_scalar = 0.0;

  Eigen::MatrixXd covariance() const;
};

AsymptoticMoments asymptotic_mean_cov(double theta, double sigma_y, double sigma_inf,
                                      std::size_t n);

/// max |P - (A P A^T + sigma_y B 1 1^T B^T)|
double verify_covariance_fixed_point(const Eigen::MatrixXd& p, const Eigen::MatrixXd& a,
                                     const Eigen::MatrixXd& b_eff, double sigma_y);

/// Limit of the expected means with one agent pinned at mu_dagger.
struct StubbornEquilibrium {
  NodeId stubborn = 0;
  std::vector<NodeId> malleable;   // node ids in the order of `gamma`
  Eigen::VectorXd gamma;           // N - 1 entries, one per malleable agent
  Eigen::VectorXd limit_means;     // N entries; the stubborn entry is mu_dagger
  double block_spectral_radius = 0.0;
  double condition_number = 1.0;   // of (I - A_{-s,-s}), 1-norm estimate
};

/// gamma = (I - A_{-s,-s})^{-1} (B_{-s,-s} 1 theta + A_{-s,s} mu_dagger), where the
/// blocks drop row/column s of the system matrices.
///
/// Throws InstabilityError when rho(A_{-s,-s}) >= 1 and NumericalError when the
/// solve is singular.
StubbornEquilibrium stubborn_equilibrium(const SocialGraph& g, const MeanCoupling& coupling,
                                         NodeId stubborn, double mu_dagger, double theta);

/// Mean absolute displacement of the malleable limits from theta.
double centrality_from_equilibrium(const StubbornEquilibrium& eq, double theta);

/// Centrality of node s: how far the crowd's limit beliefs move off theta when
/// s is made stubborn at mu_dagger. Errors propagate from stubborn_equilibrium.
double centrality_score(const SocialGraph& g, const MeanCoupling& coupling, NodeId s,
                        double mu_dagger, double theta);

struct StabilityReport {
  double spectral_radius = 0.0;                 // rho(A)
  std::optional<double> block_spectral_radius;  // rho(A_{-s,-s}) when a stubborn agent is set
  double row_sum_residual = 0.0;                // max |(W^T - D) 1|
  bool row_sum_ok = false;                      // residual <= 1e-12
  bool mean_convergence_ok = false;             // row sums ok and rho(A) < 1
  std::optional<bool> stubborn_convergence_ok;  // rho(A_{-s,-s}) < 1
  bool degenerate_gain = false;                 // sigma_inf == 0: no observation injection
};

StabilityReport stability_report(const SocialGraph& g, const MeanCoupling& coupling,
                                 std::optional<NodeId> stubborn = std::nullopt);

/// Removes row and column s.
Eigen::MatrixXd drop_index(const Eigen::MatrixXd& m, Eigen::Index s);

}  // namespace gmop
