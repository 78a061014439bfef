#pragma once

#include <span>
#include <string>

// Nonlinear least-squares fitting of a Gaussian dip/anti-dip
//   y = b + d * exp(-4 ln2 (x - c)^2 / w^2)
// parameterized directly by the FWHM w. Negative depth is a dip, positive an
// anti-dip. Damped least-squares iteration with the analytic Jacobian; a
// finite-difference Jacobian exists only in the tests as an oracle.

namespace chromahom::fitkit {

struct GaussianDipFit {
  double baseline = 0.0;
  double depth = 0.0;  // signed
  double center_s = 0.0;
  double fwhm_s = 0.0;
  double visibility = 0.0;  // |depth| / baseline

  struct Sigma {
    double baseline = 0.0;
    double depth = 0.0;
    double center_s = 0.0;
    double fwhm_s = 0.0;
    double visibility = 0.0;
  } sigma;

  bool converged = false;
  int iterations = 0;
  double residual = 0.0;  // final weighted sum of squared residuals
  // Noise can push |depth| past the baseline; the overshoot is reported, not
  // clamped.
  bool visibility_overshoot = false;

  std::string to_json() const;
};

enum class Weighting {
  Uniform,  // probability-like data
  Poisson,  // count data: w_i = 1 / max(y_i, 1)
};

struct FitOptions {
  Weighting weighting = Weighting::Uniform;
  int max_iterations = 200;
  double relative_tolerance = 1e-10;
};

struct InitialGuess {
  double baseline = 0.0;
  double depth = 0.0;
  double center = 0.0;
  double fwhm = 0.0;
  bool fwhm_fallback = false;    // no half-depth crossing; used scan width / 4
  bool extremum_at_edge = false; // degenerate (monotone) data
};

// baseline = median of the outer 20% of samples, depth/center from the
// extremum, fwhm from interpolated half-depth crossings.
InitialGuess initial_guess(std::span<const double> xs, std::span<const double> ys);

// weights may be empty (derived from options.weighting) or per-point inverse
// variances. Requires at least 8 points. Throws FitError for degenerate data
// or non-convergence.
GaussianDipFit fit_gaussian_feature(std::span<const double> xs, std::span<const double> ys,
                                    std::span<const double> weights = {},
                                    const FitOptions& options = {});

}  // namespace chromahom::fitkit
