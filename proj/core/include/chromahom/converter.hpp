#pragma once

#include <iosfwd>
#include <vector>

#include "chromahom/spectra.hpp"

// The active beam splitter: frequency-dependent transition probability of the
// pumped converter, the pump-power calibration curve, and the splitting-ratio
// estimator built from large-delay coincidence peak areas.

namespace chromahom::converter {

enum class ProfileKind { Sinc2, Gaussian, Flat };

struct ConverterModel {
  // Peak transition probability at the profile center.
  double eta0 = 0.476;
  // Intensity FWHM of eta(f); the FWHM is the contract, the analytic shape is
  // selected by `profile`.
  double bandwidth_hz = 110e9;
  ProfileKind profile = ProfileKind::Sinc2;
  // Pump frequency mismatch; shifts the profile center.
  double pump_detuning_hz = 0.0;

  void validate() const;
};

struct PumpCalibration {
  // Circulating pump power at which the transition probability reaches 1.
  double p_max_watts = 149.0;
  // Cavity power enhancement factor, informational only.
  double enhancement = 50.0;

  void validate() const;
};

// eta = sin^2((pi/2) sqrt(p / p_max)), monotone on [0, p_max]. Throws
// std::domain_error outside that branch.
double transition_probability(double p_watts, const PumpCalibration& cal);

// Inverse of transition_probability: the circulating power that realizes the
// requested splitting ratio.
double balance_pump_power(double target_eta, const PumpCalibration& cal);

// Per-grid-point no-swap/swap amplitudes t(f) = sqrt(1 - eta(f)),
// r(f) = sqrt(eta(f)); t^2 + r^2 = 1 holds pointwise.
struct ConversionProfile {
  std::vector<double> t;
  std::vector<double> r;
};

ConversionProfile conversion_profile(const ConverterModel& model, const spectra::FrequencyGrid& grid);

// Splitting-ratio estimate from the two large-delay coincidence peak areas
// p2 (both photons swapped) and p1 (both remained):
// eta = sqrt(p2/p1) / (1 + sqrt(p2/p1)). Throws AnalysisError for p1 <= 0.
double eta_from_peak_ratio(double p2, double p1);

// Columns: p_watts, eta over [0, p_max].
void write_calibration_csv(const PumpCalibration& cal, int n_points, std::ostream& os);

}  // namespace chromahom::converter
