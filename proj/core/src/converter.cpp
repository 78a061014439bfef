#include "chromahom/converter.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "chromahom/errors.hpp"

namespace chromahom::converter {

namespace {

double sinc(double x) {
  if (x == 0.0) return 1.0;
  return std::sin(x) / x;
}

// Unit-peak intensity profile with the requested intensity FWHM.
double unit_profile(ProfileKind kind, double fwhm_hz, double f) {
  switch (kind) {
    case ProfileKind::Flat:
      return 1.0;
    case ProfileKind::Gaussian:
      return std::exp(-4.0 * std::log(2.0) * f * f / (fwhm_hz * fwhm_hz));
    case ProfileKind::Sinc2: {
      const double s = sinc(2.0 * spectra::sinc_half_intensity_point() * f / fwhm_hz);
      return s * s;
    }
  }
  return 0.0;
}

}  // namespace

void ConverterModel::validate() const {
  if (!(eta0 >= 0.0 && eta0 <= 1.0)) {
    throw std::invalid_argument("ConverterModel: eta0 must be in [0, 1]");
  }
  if (profile != ProfileKind::Flat && !(bandwidth_hz > 0.0)) {
    throw std::invalid_argument("ConverterModel: bandwidth must be positive");
  }
}

void PumpCalibration::validate() const {
  if (!(p_max_watts > 0.0)) throw std::invalid_argument("PumpCalibration: p_max must be positive");
}

double transition_probability(double p_watts, const PumpCalibration& cal) {
  cal.validate();
  if (!(p_watts >= 0.0 && p_watts <= cal.p_max_watts)) {
    throw std::domain_error("transition_probability: power outside the fitted branch [0, p_max]");
  }
  const double s = std::sin(std::numbers::pi / 2.0 * std::sqrt(p_watts / cal.p_max_watts));
  return s * s;
}

double balance_pump_power(double target_eta, const PumpCalibration& cal) {
  cal.validate();
  if (!(target_eta >= 0.0 && target_eta <= 1.0)) {
    throw std::domain_error("balance_pump_power: eta must be in [0, 1]");
  }
  const double x = 2.0 / std::numbers::pi * std::asin(std::sqrt(target_eta));
  return cal.p_max_watts * x * x;
}

ConversionProfile conversion_profile(const ConverterModel& model, const spectra::FrequencyGrid& grid) {
  model.validate();
  ConversionProfile out;
  out.t.resize(static_cast<std::size_t>(grid.size()));
  out.r.resize(static_cast<std::size_t>(grid.size()));
  for (int i = 0; i < grid.size(); ++i) {
    const double eta =
        model.eta0 * unit_profile(model.profile, model.bandwidth_hz,
                                  grid.frequency(i) - model.pump_detuning_hz);
    out.r[static_cast<std::size_t>(i)] = std::sqrt(eta);
    out.t[static_cast<std::size_t>(i)] = std::sqrt(1.0 - eta);
  }
  return out;
}

double eta_from_peak_ratio(double p2, double p1) {
  if (!(p1 > 0.0)) throw AnalysisError("eta_from_peak_ratio: no-swap peak must be positive");
  if (p2 < 0.0) throw AnalysisError("eta_from_peak_ratio: negative swap peak");
  const double q = std::sqrt(p2 / p1);
  return q / (1.0 + q);
}

void write_calibration_csv(const PumpCalibration& cal, int n_points, std::ostream& os) {
  cal.validate();
  if (n_points < 2) throw std::invalid_argument("write_calibration_csv: need at least 2 points");
  os << "p_watts,eta\n";
  os.precision(17);
  for (int i = 0; i < n_points; ++i) {
    const double p = cal.p_max_watts * i / (n_points - 1);
    os << p << ',' << transition_probability(p, cal) << '\n';
  }
}

}  // namespace chromahom::converter
