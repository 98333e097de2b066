#include "gmop/belief.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "gmop/error.hpp"

namespace gmop {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_variance(double variance) {
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    throw InvalidParameter("variance must be finite and > 0 (got " + std::to_string(variance) +
                           ")");
  }
}

double trapezoid(const std::vector<double>& f, double h) {
  double s = 0.5 * (f.front() + f.back());
  for (std::size_t k = 1; k + 1 < f.size(); ++k) s += f[k];
  return s * h;
}

}  // namespace

double gaussian_log_pdf(double x, const Gaussian& g) {
  require_variance(g.variance);
  const double d = x - g.mean;
  return -0.5 * std::log(2.0 * std::numbers::pi * g.variance) - d * d / (2.0 * g.variance);
}

double gaussian_pdf(double x, const Gaussian& g) {
  require_variance(g.variance);
  const double d = x - g.mean;
  return std::exp(-d * d / (2.0 * g.variance)) / std::sqrt(2.0 * std::numbers::pi * g.variance);
}

GaussianMixture::GaussianMixture(std::vector<Mode> modes) : modes_(std::move(modes)) {
  if (modes_.empty()) throw InvalidParameter("mixture needs at least one mode");
  double total = 0.0;
  for (const Mode& m : modes_) {
    if (!std::isfinite(m.mean)) throw InvalidParameter("mixture mode mean must be finite");
    require_variance(m.variance);
    if (!(m.weight >= 0.0 && m.weight <= 1.0)) {
      throw InvalidParameter("mixture weight outside [0, 1] (got " + std::to_string(m.weight) +
                             ")");
    }
    total += m.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw InvalidParameter("mixture weights must sum to 1 (got " + std::to_string(total) + ")");
  }
  for (Mode& m : modes_) m.weight /= total;
}

GaussianMixture GaussianMixture::single(const Gaussian& g) {
  return GaussianMixture({Mode{g.mean, g.variance, 1.0}});
}

double mixture_pdf(double x, const GaussianMixture& b) {
  double p = 0.0;
  for (const Mode& m : b.modes()) p += m.weight * gaussian_pdf(x, {m.mean, m.variance});
  return p;
}

double mixture_mean(const GaussianMixture& b) {
  double mu = 0.0;
  for (const Mode& m : b.modes()) mu += m.weight * m.mean;
  return mu;
}

void ObservationModel::validate() const {
  if (!std::isfinite(theta)) throw InvalidParameter("theta must be finite");
  if (!(sigma_y > 0.0) || !std::isfinite(sigma_y)) {
    throw InvalidParameter("sigma_y must be finite and > 0");
  }
}

bool normalize_log_weights(std::span<const double> log_weights, std::span<double> out) {
  double top = kNegInf;
  for (double lw : log_weights) {
    if (std::isfinite(lw)) top = std::max(top, lw);
  }
  if (top == kNegInf) {
    std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(out.size()));
    return true;
  }
  double total = 0.0;
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    const double lw = log_weights[i];
    out[i] = std::isfinite(lw) ? std::exp(lw - top) : 0.0;
    total += out[i];
  }
  for (double& w : out) w /= total;
  return false;
}

bool bayes_update_modes(std::span<double> means, std::span<double> variances,
                        std::span<double> weights, double y, double sigma_y,
                        WeightLikelihood likelihood) {
  const std::size_t m = means.size();
  std::vector<double> log_w(m);

  for (std::size_t i = 0; i < m; ++i) {
    const double var = variances[i];
    const double spread = likelihood == WeightLikelihood::Predictive ? var + sigma_y : var;
    const double d = y - means[i];
    const double ll = -0.5 * std::log(2.0 * std::numbers::pi * spread) - d * d / (2.0 * spread);
    log_w[i] = weights[i] > 0.0 ? std::log(weights[i]) + ll : kNegInf;
  }
  const bool degenerate = normalize_log_weights(log_w, weights);

  for (std::size_t i = 0; i < m; ++i) {
    const double var = variances[i];
    const double gain = var / (var + sigma_y);
    means[i] += gain * (y - means[i]);
    variances[i] = var * sigma_y / (var + sigma_y);
  }
  return degenerate;
}

BayesUpdate bayes_update(const GaussianMixture& prior, double y, double sigma_y,
                         WeightLikelihood likelihood) {
  ObservationModel{y, sigma_y}.validate();
  const std::size_t m = prior.size();
  std::vector<double> means(m), vars(m), weights(m);
  for (std::size_t i = 0; i < m; ++i) {
    means[i] = prior[i].mean;
    vars[i] = prior[i].variance;
    weights[i] = prior[i].weight;
  }
  const bool degenerate = bayes_update_modes(means, vars, weights, y, sigma_y, likelihood);
  std::vector<Mode> modes(m);
  for (std::size_t i = 0; i < m; ++i) modes[i] = {means[i], vars[i], weights[i]};
  return {GaussianMixture(std::move(modes)), degenerate};
}

PosteriorDensity posterior_oracle(const GaussianMixture& prior, double y, double sigma_y,
                                  const QuadratureGrid& grid) {
  ObservationModel{y, sigma_y}.validate();
  if (grid.points < 10000) throw InvalidParameter("posterior_oracle needs >= 1e4 grid points");
  if (!(grid.hi > grid.lo)) throw InvalidParameter("posterior_oracle grid needs hi > lo");

  const std::size_t n = grid.points;
  const double h = (grid.hi - grid.lo) / static_cast<double>(n - 1);
  const double width = grid.hi - grid.lo;

  PosteriorDensity out;
  out.grid.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.grid[k] = grid.lo + h * static_cast<double>(k);
  out.density.assign(n, 0.0);

  const std::size_t m = prior.size();
  std::vector<std::vector<double>> shapes(m);
  std::vector<double> log_mass(m, kNegInf);
  out.components.resize(m);

  for (std::size_t i = 0; i < m; ++i) {
    const Mode& mode = prior[i];
    ComponentMoments& c = out.components[i];
    if (mode.weight == 0.0) {
      c = {0.0, std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
      continue;
    }
    std::vector<double> logf(n);
    double top = kNegInf;
    for (std::size_t k = 0; k < n; ++k) {
      const double t = out.grid[k];
      logf[k] = std::log(mode.weight) + gaussian_log_pdf(t, {mode.mean, mode.variance}) +
                gaussian_log_pdf(y, {t, sigma_y});
      top = std::max(top, logf[k]);
    }
    std::vector<double>& f = shapes[i];
    f.resize(n);
    for (std::size_t k = 0; k < n; ++k) f[k] = std::exp(logf[k] - top);
    const double z = trapezoid(f, h);
    if (std::max(f.front(), f.back()) / z * width >= 1e-6) {
      throw std::runtime_error("posterior_oracle: grid too narrow, component " + std::to_string(i) +
                               " has non-negligible density at the boundary");
    }
    for (double& v : f) v /= z;
    log_mass[i] = top + std::log(z);

    std::vector<double> moment(n);
    for (std::size_t k = 0; k < n; ++k) moment[k] = out.grid[k] * f[k];
    c.mean = trapezoid(moment, h);
    for (std::size_t k = 0; k < n; ++k) {
      const double d = out.grid[k] - c.mean;
      moment[k] = d * d * f[k];
    }
    c.variance = trapezoid(moment, h);
  }

  std::vector<double> mass(m);
  normalize_log_weights(log_mass, mass);
  for (std::size_t i = 0; i < m; ++i) {
    out.components[i].mass = mass[i];
    if (shapes[i].empty()) continue;
    for (std::size_t k = 0; k < n; ++k) out.density[k] += mass[i] * shapes[i][k];
  }

  std::vector<double> moment(n);
  for (std::size_t k = 0; k < n; ++k) moment[k] = out.grid[k] * out.density[k];
  out.mean = trapezoid(moment, h);
  for (std::size_t k = 0; k < n; ++k) {
    const double d = out.grid[k] - out.mean;
    moment[k] = d * d * out.density[k];
  }
  out.variance = trapezoid(moment, h);
  return out;
}

}  // namespace gmop
