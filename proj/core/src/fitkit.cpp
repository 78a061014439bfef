#include "chromahom/fitkit.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "chromahom/errors.hpp"

namespace chromahom::fitkit {

namespace {

constexpr double kFourLn2 = 4.0 * std::numbers::ln2;

double median(std::vector<double> v) {
  const auto mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
  }
  return m;
}

struct Model {
  // params: b, d, c, w on the rescaled x axis.
  static double eval(const double* p, double x) {
    const double u = (x - p[2]) / p[3];
    return p[0] + p[1] * std::exp(-kFourLn2 * u * u);
  }
  static void jacobian(const double* p, double x, double* j) {
    const double dx = x - p[2];
    const double u = dx / p[3];
    const double e = std::exp(-kFourLn2 * u * u);
    j[0] = 1.0;
    j[1] = e;
    j[2] = p[1] * e * 2.0 * kFourLn2 * dx / (p[3] * p[3]);
    j[3] = p[1] * e * 2.0 * kFourLn2 * dx * dx / (p[3] * p[3] * p[3]);
  }
};

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

InitialGuess initial_guess(std::span<const double> xs, std::span<const double> ys) {
  const std::size_t n = ys.size();
  if (n < 4 || xs.size() != n) throw std::invalid_argument("initial_guess: bad input sizes");

  const std::size_t edge = std::max<std::size_t>(1, n / 10);
  std::vector<double> outer;
  outer.reserve(2 * edge);
  for (std::size_t i = 0; i < edge; ++i) {
    outer.push_back(ys[i]);
    outer.push_back(ys[n - 1 - i]);
  }

  InitialGuess g;
  g.baseline = median(std::move(outer));

  std::size_t ext = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs(ys[i] - g.baseline) > std::abs(ys[ext] - g.baseline)) ext = i;
  }
  g.depth = ys[ext] - g.baseline;
  g.center = xs[ext];
  g.extremum_at_edge = (ext == 0 || ext == n - 1);

  const double half = g.baseline + 0.5 * g.depth;
  const auto inside = [&](std::size_t i) {
    return g.depth < 0.0 ? ys[i] < half : ys[i] > half;
  };
  std::size_t lo = ext;
  while (lo > 0 && inside(lo)) --lo;
  std::size_t hi = ext;
  while (hi < n - 1 && inside(hi)) ++hi;
  if (!inside(lo) && !inside(hi) && hi > lo && g.depth != 0.0) {
    const auto interp = [&](std::size_t out, std::size_t in) {
      const double denom = ys[in] - ys[out];
      const double frac = denom != 0.0 ? (ys[in] - half) / denom : 0.5;
      return xs[in] + frac * (xs[out] - xs[in]);
    };
    g.fwhm = interp(hi, hi - 1) - interp(lo, lo + 1);
  }
  if (!(g.fwhm > 0.0)) {
    g.fwhm = std::abs(xs[n - 1] - xs[0]) / 4.0;
    g.fwhm_fallback = true;
  }
  return g;
}

GaussianDipFit fit_gaussian_feature(std::span<const double> xs, std::span<const double> ys,
                                    std::span<const double> weights, const FitOptions& options) {
  const std::size_t n = ys.size();
  if (n < 8 || xs.size() != n) {
    throw std::invalid_argument("fit_gaussian_feature: need at least 8 points");
  }
  if (!weights.empty() && weights.size() != n) {
    throw std::invalid_argument("fit_gaussian_feature: weight size mismatch");
  }

  const InitialGuess guess = initial_guess(xs, ys);
  if (guess.depth == 0.0) throw FitError("fit_gaussian_feature: flat data");
  if (guess.extremum_at_edge) {
    throw FitError("fit_gaussian_feature: extremum at the scan edge (monotone data?)");
  }

  // Rescale the x axis to order 1: keeps the normal equations conditioned for
  // picosecond-scale delays and makes the fit exactly translation-equivariant.
  const double x0 = median(std::vector<double>(xs.begin(), xs.end()));
  double scale = 0.0;
  for (const double x : xs) scale = std::max(scale, std::abs(x - x0));
  if (!(scale > 0.0)) throw std::invalid_argument("fit_gaussian_feature: degenerate x axis");

  std::vector<double> xr(n);
  for (std::size_t i = 0; i < n; ++i) xr[i] = (xs[i] - x0) / scale;

  std::vector<double> w(n, 1.0);
  if (!weights.empty()) {
    for (std::size_t i = 0; i < n; ++i) w[i] = weights[i];
  } else if (options.weighting == Weighting::Poisson) {
    for (std::size_t i = 0; i < n; ++i) w[i] = 1.0 / std::max(ys[i], 1.0);
  }

  double p[4] = {guess.baseline, guess.depth, (guess.center - x0) / scale, guess.fwhm / scale};

  const auto cost_of = [&](const double* q) {
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = ys[i] - Model::eval(q, xr[i]);
      c += w[i] * r * r;
    }
    return c;
  };

  double cost = cost_of(p);
  double lambda = 1e-3;
  bool converged = false;
  int iter = 0;

  Eigen::Matrix4d jtj;
  Eigen::Vector4d jtr;
  for (; iter < options.max_iterations && !converged; ++iter) {
    jtj.setZero();
    jtr.setZero();
    double j[4];
    for (std::size_t i = 0; i < n; ++i) {
      Model::jacobian(p, xr[i], j);
      const double r = ys[i] - Model::eval(p, xr[i]);
      for (int a = 0; a < 4; ++a) {
        jtr(a) += w[i] * j[a] * r;
        for (int b = a; b < 4; ++b) jtj(a, b) += w[i] * j[a] * j[b];
      }
    }
    for (int a = 1; a < 4; ++a) {
      for (int b = 0; b < a; ++b) jtj(a, b) = jtj(b, a);
    }

    bool stepped = false;
    while (lambda < 1e14) {
      Eigen::Matrix4d damped = jtj;
      for (int a = 0; a < 4; ++a) damped(a, a) += lambda * std::max(jtj(a, a), 1e-30);
      const Eigen::Vector4d delta = damped.ldlt().solve(jtr);
      double trial[4] = {p[0] + delta(0), p[1] + delta(1), p[2] + delta(2), p[3] + delta(3)};
      if (trial[3] > 0.0) {
        const double trial_cost = cost_of(trial);
        if (trial_cost <= cost) {
          const double drop = cost - trial_cost;
          std::copy(trial, trial + 4, p);
          if (drop <= options.relative_tolerance * std::max(cost, 1e-300)) converged = true;
          cost = trial_cost;
          lambda = std::max(lambda / 3.0, 1e-12);
          stepped = true;
          break;
        }
      }
      lambda *= 4.0;
    }
    if (!stepped) {
      // No damping produces an improvement: stationary point.
      converged = true;
    }
  }

  if (!converged) {
    throw FitError("fit_gaussian_feature: no convergence after " +
                   std::to_string(options.max_iterations) +
                   " iterations, residual = " + format_double(cost));
  }

  // Covariance from the undamped normal equations at the optimum, scaled by
  // the reduced chi-square.
  jtj.setZero();
  double j[4];
  for (std::size_t i = 0; i < n; ++i) {
    Model::jacobian(p, xr[i], j);
    for (int a = 0; a < 4; ++a) {
      for (int b = a; b < 4; ++b) jtj(a, b) += w[i] * j[a] * j[b];
    }
  }
  for (int a = 1; a < 4; ++a) {
    for (int b = 0; b < a; ++b) jtj(a, b) = jtj(b, a);
  }
  const double dof = static_cast<double>(n) - 4.0;
  const double chi2_scale = dof > 0.0 ? cost / dof : 0.0;
  const Eigen::Matrix4d cov =
      chi2_scale * jtj.fullPivLu().inverse();

  GaussianDipFit fit;
  fit.baseline = p[0];
  fit.depth = p[1];
  fit.center_s = x0 + scale * p[2];
  fit.fwhm_s = scale * p[3];
  if (!(fit.baseline > 0.0)) throw FitError("fit_gaussian_feature: non-positive fitted baseline");
  fit.visibility = std::abs(fit.depth) / fit.baseline;
  fit.visibility_overshoot = fit.visibility > 1.0;
  fit.converged = converged;
  fit.iterations = iter;
  fit.residual = cost;

  const auto sigma = [&](int a) { return std::sqrt(std::max(cov(a, a), 0.0)); };
  fit.sigma.baseline = sigma(0);
  fit.sigma.depth = sigma(1);
  fit.sigma.center_s = scale * sigma(2);
  fit.sigma.fwhm_s = scale * sigma(3);
  // Propagated through |d|/b including the d-b covariance.
  const double dvdd = (fit.depth < 0.0 ? -1.0 : 1.0) / fit.baseline;
  const double dvdb = -fit.visibility / fit.baseline;
  const double var = dvdd * dvdd * cov(1, 1) + dvdb * dvdb * cov(0, 0) +
                     2.0 * dvdd * dvdb * cov(0, 1);
  fit.sigma.visibility = std::sqrt(std::max(var, 0.0));
  return fit;
}

std::string GaussianDipFit::to_json() const {
  std::string s = "{";
  s += "\"baseline\": " + format_double(baseline);
  s += ", \"depth\": " + format_double(depth);
  s += ", \"center_s\": " + format_double(center_s);
  s += ", \"fwhm_s\": " + format_double(fwhm_s);
  s += ", \"visibility\": " + format_double(visibility);
  s += ", \"sigma\": {";
  s += "\"baseline\": " + format_double(sigma.baseline);
  s += ", \"depth\": " + format_double(sigma.depth);
  s += ", \"center_s\": " + format_double(sigma.center_s);
  s += ", \"fwhm_s\": " + format_double(sigma.fwhm_s);
  s += ", \"visibility\": " + format_double(sigma.visibility);
  s += "}";
  s += std::string(", \"converged\": ") + (converged ? "true" : "false");
  s += ", \"iterations\": " + std::to_string(iterations);
  s += ", \"residual\": " + format_double(residual);
  s += std::string(", \"visibility_overshoot\": ") + (visibility_overshoot ? "true" : "false");
  s += "}";
  return s;
}

}  // namespace chromahom::fitkit
