#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "chromahom/converter.hpp"
#include "chromahom/spectra.hpp"

// Cross-color coincidence dip and same-color anti-dips versus relative delay,
// computed from the frequency-anticorrelated pair amplitude, the collection
// filters and the frequency-dependent converter. A photon pair occupies the
// detunings (+f) in the red arm and (-f) in the telecom arm; the converter
// couples equal-detuning modes of the two colors, so each mirrored detuning
// pair evolves as two independent two-mode couplings.

namespace chromahom::interference {

enum class FilterPlacement { PreConverter, PostConverter };
enum class Channel { Cross, TelecomTelecom, RedRed };

struct ExperimentModel {
  spectra::SpectralModel source{spectra::ModelKind::Sinc, 75e9};
  converter::ConverterModel converter{};
  spectra::SpectralModel telecom_filter{spectra::ModelKind::Gaussian, 105e9};
  FilterPlacement telecom_placement = FilterPlacement::PostConverter;
  // The red-arm bandpass is orders of magnitude wider than every other
  // bandwidth in the problem; Flat models it without dropping it.
  spectra::SpectralModel red_filter{spectra::ModelKind::Flat, 0.0};
  spectra::FrequencyGrid grid{};
  // Weight of the coherent interference term. 1 is the quantum prediction;
  // 0.5 realizes the best phase-averaged (distinguishable-path) model and
  // demonstrates the classical 50% visibility bound.
  double cross_term_weight = 1.0;

  void validate() const;
};

// Coincidence probabilities per pair versus delay. The delay is applied to
// the telecom arm ahead of the converter; probabilities are normalized so the
// flat balanced-converter cross-color baseline is 1/2.
struct DelayScan {
  std::vector<double> delays_s;
  std::vector<double> p_cross;
  std::vector<double> p_tt;
  std::vector<double> p_rr;
  // Set when the delay grid cannot resolve or does not cover the expected
  // feature; the scan is still produced.
  std::string warning;

  void write_csv(std::ostream& os) const;
};

DelayScan cross_color_dip(const ExperimentModel& model, std::span<const double> delays_s,
                          int threads = 1);
DelayScan same_color_antidips(const ExperimentModel& model, std::span<const double> delays_s,
                              int threads = 1);
// Both of the above in one pass.
DelayScan full_delay_scan(const ExperimentModel& model, std::span<const double> delays_s,
                          int threads = 1);

struct VisibilityResult {
  double visibility = 0.0;
  double feature_delay_s = 0.0;
  double baseline = 0.0;
  double extremum = 0.0;
};

// Baseline-relative feature depth. Dips: (P_far - P_min) / P_far; anti-dips:
// (P_max - P_far) / P_far. The baseline comes from the outer 20% of delay
// samples; throws AnalysisError when the scan does not cover ~5 feature
// widths of baseline.
VisibilityResult visibility(const DelayScan& scan, Channel channel);

// Feature FWHM read directly off the scan by half-crossing interpolation.
double feature_fwhm(const DelayScan& scan, Channel channel);

// Independent verification route: per mirrored detuning pair, explicit Fock
// evolution of the photon pair through two two-mode couplings, summing output
// projector weights. Shares the model sampling with the analytic scan but no
// integral code. Requires grid size <= 512 and cross_term_weight == 1.
DelayScan oracle_delay_scan(const ExperimentModel& model, std::span<const double> delays_s);

// Timing resolution needed to resolve the beat of two detunings separated by
// delta_nu: 1 / delta_nu.
double beat_note_resolution(double delta_nu_hz);

}  // namespace chromahom::interference
