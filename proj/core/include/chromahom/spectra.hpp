#pragma once

#include <complex>
#include <iosfwd>
#include <vector>

// Spectral amplitude grids and the analytic line-shape models used for the
// pair source, the frequency converter and the collection filters. All
// detunings are ordinary frequencies in Hz; quoted widths are intensity FWHM.

namespace chromahom::spectra {

// Uniform detuning grid, symmetric about zero. The sample count is forced odd
// internally so the grid contains an exact zero sample and exact +/- mirror
// pairs; the configured count is kept for reporting.
class FrequencyGrid {
 public:
  explicit FrequencyGrid(int n_points = 4096, double span_hz = 2e12);

  int configured_points() const { return configured_; }
  int size() const { return n_; }
  double span() const { return span_; }
  double spacing() const { return span_ / (n_ - 1); }

  // Detuning of sample i; frequency(mirror_index(i)) == -frequency(i) exactly.
  double frequency(int i) const { return spacing() * (i - (n_ - 1) / 2); }
  int mirror_index(int i) const { return n_ - 1 - i; }
  int zero_index() const { return (n_ - 1) / 2; }

  bool operator==(const FrequencyGrid& other) const {
    return n_ == other.n_ && span_ == other.span_;
  }

 private:
  int configured_;
  int n_;
  double span_;
};

enum class ModelKind { Sinc, Gaussian, Flat };

// Line-shape model; fwhm_hz is the FWHM of the intensity |amp|^2 and is
// ignored for Flat.
struct SpectralModel {
  ModelKind kind = ModelKind::Gaussian;
  double fwhm_hz = 0.0;
};

struct SpectralAmplitude {
  FrequencyGrid grid;
  std::vector<std::complex<double>> amp;

  double intensity(int i) const { return std::norm(amp[static_cast<std::size_t>(i)]); }
};

// Positive x solving sinc(x)^2 = 1/2; relates a sinc argument scale to the
// intensity FWHM.
double sinc_half_intensity_point();

// Samples the model on the grid. Amplitudes are real with the maximum at zero
// detuning; for Sinc the argument scale is chosen so the intensity FWHM
// matches, for Gaussian likewise. Throws ConfigError when the grid span is
// below 8x the requested FWHM (sinc sidelobes would be cut off).
SpectralAmplitude sample_model(const SpectralModel& model, const FrequencyGrid& grid);

// Intensity FWHM with linear interpolation between samples. Requires a single
// global intensity maximum with half-maximum crossings inside the grid;
// throws AnalysisError otherwise (e.g. for a flat amplitude).
double measure_fwhm(const SpectralAmplitude& s);

// Pointwise product; both amplitudes must live on the same grid.
SpectralAmplitude multiply(const SpectralAmplitude& a, const SpectralAmplitude& b);

// Rescales so that sum |amp|^2 * spacing == 1. Throws std::domain_error for
// (numerically) zero input.
SpectralAmplitude normalize(const SpectralAmplitude& s);

// Columns: detuning_hz, re, im.
void write_csv(const SpectralAmplitude& s, std::ostream& os);

}  // namespace chromahom::spectra
