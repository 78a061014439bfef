#include "chromahom/spectra.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "chromahom/errors.hpp"

namespace chromahom::spectra {

namespace {

double sinc(double x) {
  if (x == 0.0) return 1.0;
  return std::sin(x) / x;
}

double solve_sinc_half_point() {
  // sinc^2 is monotone on [0, pi]; bisect sinc(x) = 1/sqrt(2).
  const double target = 1.0 / std::sqrt(2.0);
  double lo = 1.0, hi = 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (sinc(mid) > target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double sinc_half_intensity_point() {
  static const double value = solve_sinc_half_point();
  return value;
}

FrequencyGrid::FrequencyGrid(int n_points, double span_hz)
    : configured_(n_points), n_(n_points | 1), span_(span_hz) {
  if (n_points < 9) throw std::invalid_argument("FrequencyGrid: need at least 9 points");
  if (!(span_hz > 0.0)) throw std::invalid_argument("FrequencyGrid: span must be positive");
}

SpectralAmplitude sample_model(const SpectralModel& model, const FrequencyGrid& grid) {
  SpectralAmplitude out{grid, std::vector<std::complex<double>>(static_cast<std::size_t>(grid.size()))};

  if (model.kind == ModelKind::Flat) {
    for (auto& a : out.amp) a = 1.0;
    return out;
  }

  if (!(model.fwhm_hz > 0.0)) {
    throw std::invalid_argument("sample_model: fwhm must be positive for non-flat models");
  }
  if (grid.span() < 8.0 * model.fwhm_hz) {
    throw ConfigError("sample_model: grid span must be at least 8x the model FWHM");
  }

  if (model.kind == ModelKind::Gaussian) {
    // |amp|^2 = exp(-4 ln2 (f/fwhm)^2)
    const double c = 2.0 * std::log(2.0) / (model.fwhm_hz * model.fwhm_hz);
    for (int i = 0; i < grid.size(); ++i) {
      const double f = grid.frequency(i);
      out.amp[static_cast<std::size_t>(i)] = std::exp(-c * f * f);
    }
  } else {
    // amp = sinc(a f) with sinc^2 reaching 1/2 at f = fwhm/2.
    const double a = 2.0 * sinc_half_intensity_point() / model.fwhm_hz;
    for (int i = 0; i < grid.size(); ++i) {
      out.amp[static_cast<std::size_t>(i)] = sinc(a * grid.frequency(i));
    }
  }
  return out;
}

double measure_fwhm(const SpectralAmplitude& s) {
  const int n = s.grid.size();
  int peak = 0;
  double peak_val = s.intensity(0);
  for (int i = 1; i < n; ++i) {
    if (s.intensity(i) > peak_val) {
      peak_val = s.intensity(i);
      peak = i;
    }
  }
  if (!(peak_val > 0.0)) throw AnalysisError("measure_fwhm: zero amplitude");

  const double half = 0.5 * peak_val;
  // Walk outward from the peak to the first crossing on each side;
  // interpolate the crossing position linearly in intensity.
  int lo = peak;
  while (lo > 0 && s.intensity(lo) >= half) --lo;
  int hi = peak;
  while (hi < n - 1 && s.intensity(hi) >= half) ++hi;
  if (s.intensity(lo) >= half || s.intensity(hi) >= half) {
    throw AnalysisError("measure_fwhm: no half-maximum crossing inside the grid");
  }
  const auto interp = [&](int outside, int inside) {
    const double yi = s.intensity(inside);
    const double yo = s.intensity(outside);
    const double frac = (yi - half) / (yi - yo);
    return s.grid.frequency(inside) +
           frac * (s.grid.frequency(outside) - s.grid.frequency(inside));
  };
  return interp(hi, hi - 1) - interp(lo, lo + 1);
}

SpectralAmplitude multiply(const SpectralAmplitude& a, const SpectralAmplitude& b) {
  if (!(a.grid == b.grid)) throw std::invalid_argument("multiply: grid mismatch");
  SpectralAmplitude out = a;
  for (std::size_t i = 0; i < out.amp.size(); ++i) out.amp[i] *= b.amp[i];
  return out;
}

SpectralAmplitude normalize(const SpectralAmplitude& s) {
  double sq = 0.0;
  for (const auto& a : s.amp) sq += std::norm(a);
  sq *= s.grid.spacing();
  if (!(sq > 0.0)) throw std::domain_error("normalize: zero spectral amplitude");
  SpectralAmplitude out = s;
  const double scale = 1.0 / std::sqrt(sq);
  for (auto& a : out.amp) a *= scale;
  return out;
}

void write_csv(const SpectralAmplitude& s, std::ostream& os) {
  os << "detuning_hz,re,im\n";
  os.precision(17);
  for (int i = 0; i < s.grid.size(); ++i) {
    const auto& a = s.amp[static_cast<std::size_t>(i)];
    os << s.grid.frequency(i) << ',' << a.real() << ',' << a.imag() << '\n';
  }
}

}  // namespace chromahom::spectra
