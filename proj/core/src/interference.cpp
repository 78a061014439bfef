#include "chromahom/interference.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "chromahom/errors.hpp"
#include "chromahom/fockcore.hpp"

namespace chromahom::interference {

namespace {

using std::numbers::pi;

void parallel_for(int n, int threads, const auto& fn) {
  threads = std::min(std::max(threads, 1), n > 0 ? n : 1);
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([=] {
      for (int i = t; i < n; i += threads) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

std::vector<double> real_samples(const spectra::SpectralModel& model,
                                 const spectra::FrequencyGrid& grid) {
  const auto s = spectra::sample_model(model, grid);
  std::vector<double> out(s.amp.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = s.amp[i].real();
  return out;
}

// Model arrays sampled once per scan. Path 1 is the component with the pair
// at (red +f, telecom -f); path 2 the mirrored component. The delay phase is
// exp(-i 2 pi f tau) on path 1 and its conjugate on path 2, so every
// interference term oscillates as cos(4 pi f tau).
struct SampledModel {
  const spectra::FrequencyGrid grid;
  std::vector<double> frequency;
  // Per-channel path amplitudes; channel probability integrands are
  // a1^2 + a2^2 -/+ 2 w a1 a2 cos(4 pi f tau) (minus for cross where the
  // swap path carries i*i, plus for the same-color channels).
  std::vector<double> cross1, cross2, tt1, tt2, rr1, rr2;
  double quad_weight = 0.0;  // N * spacing
  double cross_weight = 1.0;

  explicit SampledModel(const ExperimentModel& m) : grid(m.grid) {
    m.validate();
    const int n = grid.size();
    const auto f = real_samples(m.source, grid);
    const auto ht = real_samples(m.telecom_filter, grid);
    const auto hr = real_samples(m.red_filter, grid);
    const auto conv = converter::conversion_profile(m.converter, grid);
    const bool pre = m.telecom_placement == FilterPlacement::PreConverter;
    cross_weight = m.cross_term_weight;

    frequency.resize(static_cast<std::size_t>(n));
    cross1.resize(frequency.size());
    cross2.resize(frequency.size());
    tt1.resize(frequency.size());
    tt2.resize(frequency.size());
    rr1.resize(frequency.size());
    rr2.resize(frequency.size());

    double norm = 0.0;
    for (int i = 0; i < n; ++i) {
      const int mi = grid.mirror_index(i);
      const auto k = static_cast<std::size_t>(i);
      const auto km = static_cast<std::size_t>(mi);
      frequency[k] = grid.frequency(i);

      // Telecom filter factor seen by each path: before the converter it acts
      // on the initial telecom photon (-f for path 1, +f for path 2); after
      // the converter it acts on whichever output photon is telecom.
      const double pre1 = pre ? ht[km] : 1.0;
      const double pre2 = pre ? ht[k] : 1.0;
      const double post_cross = (pre ? 1.0 : ht[km]) * hr[k];
      const double post_tt = pre ? 1.0 : ht[k] * ht[km];
      const double post_rr = hr[k] * hr[km];

      cross1[k] = conv.t[k] * conv.t[km] * f[k] * pre1 * post_cross;
      cross2[k] = conv.r[k] * conv.r[km] * f[km] * pre2 * post_cross;
      tt1[k] = conv.r[k] * conv.t[km] * f[k] * pre1 * post_tt;
      tt2[k] = conv.r[km] * conv.t[k] * f[km] * pre2 * post_tt;
      rr1[k] = conv.t[k] * conv.r[km] * f[k] * pre1 * post_rr;
      rr2[k] = conv.t[km] * conv.r[k] * f[km] * pre2 * post_rr;

      const double detected = f[k] * ht[km] * hr[k];
      norm += detected * detected;
    }
    if (!(norm > 0.0)) throw AnalysisError("delay scan: fully filtered pair amplitude is zero");
    // Fixes the flat balanced-converter cross-color baseline to 1/2.
    quad_weight = 1.0 / norm;
  }

  void evaluate(double tau, double& p_cross, double& p_tt, double& p_rr) const {
    double c0 = 0.0, cx = 0.0, t0 = 0.0, tx = 0.0, r0 = 0.0, rx = 0.0;
    for (std::size_t k = 0; k < frequency.size(); ++k) {
      const double phase = std::cos(4.0 * pi * frequency[k] * tau);
      c0 += cross1[k] * cross1[k] + cross2[k] * cross2[k];
      cx += cross1[k] * cross2[k] * phase;
      t0 += tt1[k] * tt1[k] + tt2[k] * tt2[k];
      tx += tt1[k] * tt2[k] * phase;
      r0 += rr1[k] * rr1[k] + rr2[k] * rr2[k];
      rx += rr1[k] * rr2[k] * phase;
    }
    const double w = cross_weight;
    p_cross = quad_weight * (c0 - 2.0 * w * cx);
    // Same-color outcomes are unordered pairs of mirrored detunings; the 1/2
    // compensates double counting over the full grid.
    p_tt = 0.5 * quad_weight * (t0 + 2.0 * w * tx);
    p_rr = 0.5 * quad_weight * (r0 + 2.0 * w * rx);
  }
};

// Gaussian-equivalent temporal width of the coincidence feature, used only to
// warn about unresolvable scans.
double expected_feature_fwhm(const ExperimentModel& m) {
  double inv_sq = 0.0;
  if (m.source.kind != spectra::ModelKind::Flat && m.source.fwhm_hz > 0) {
    inv_sq += 1.0 / (m.source.fwhm_hz * m.source.fwhm_hz);
  }
  if (m.telecom_filter.kind != spectra::ModelKind::Flat && m.telecom_filter.fwhm_hz > 0) {
    inv_sq += 1.0 / (m.telecom_filter.fwhm_hz * m.telecom_filter.fwhm_hz);
  }
  if (m.converter.profile != converter::ProfileKind::Flat && m.converter.bandwidth_hz > 0) {
    inv_sq += 1.0 / (m.converter.bandwidth_hz * m.converter.bandwidth_hz);
  }
  if (inv_sq <= 0.0) return 0.0;
  const double combined = 1.0 / std::sqrt(inv_sq);
  return 2.0 * std::numbers::ln2 / (pi * combined);
}

std::string scan_warning(const ExperimentModel& m, std::span<const double> delays) {
  if (delays.size() < 2) return "delay scan has fewer than 2 points";
  const double width = expected_feature_fwhm(m);
  if (width <= 0.0) return {};
  const auto [lo, hi] = std::minmax_element(delays.begin(), delays.end());
  double step = *hi - *lo;
  for (std::size_t i = 1; i < delays.size(); ++i) {
    step = std::min(step, std::abs(delays[i] - delays[i - 1]));
  }
  std::ostringstream msg;
  if (step > width / 2.0) {
    msg << "delay step " << step << " s cannot resolve the expected feature width ~" << width
        << " s";
  } else if (*hi - *lo < 5.0 * width) {
    msg << "delay range " << (*hi - *lo) << " s covers less than 5x the expected feature width ~"
        << width << " s";
  }
  return msg.str();
}

DelayScan run_scan(const ExperimentModel& model, std::span<const double> delays, int threads,
                   bool want_cross, bool want_same) {
  const SampledModel sm(model);
  DelayScan scan;
  scan.delays_s.assign(delays.begin(), delays.end());
  const auto n = delays.size();
  if (want_cross) scan.p_cross.resize(n);
  if (want_same) {
    scan.p_tt.resize(n);
    scan.p_rr.resize(n);
  }
  parallel_for(static_cast<int>(n), threads, [&](int i) {
    double pc, pt, pr;
    sm.evaluate(delays[static_cast<std::size_t>(i)], pc, pt, pr);
    const auto k = static_cast<std::size_t>(i);
    if (want_cross) scan.p_cross[k] = pc;
    if (want_same) {
      scan.p_tt[k] = pt;
      scan.p_rr[k] = pr;
    }
  });
  scan.warning = scan_warning(model, delays);
  return scan;
}

const std::vector<double>& channel_values(const DelayScan& scan, Channel channel) {
  switch (channel) {
    case Channel::Cross:
      return scan.p_cross;
    case Channel::TelecomTelecom:
      return scan.p_tt;
    case Channel::RedRed:
      return scan.p_rr;
  }
  throw std::invalid_argument("unknown channel");
}

}  // namespace

void ExperimentModel::validate() const {
  converter.validate();
  if (source.kind != spectra::ModelKind::Flat && !(source.fwhm_hz > 0.0)) {
    throw std::invalid_argument("ExperimentModel: source fwhm must be positive");
  }
  if (telecom_filter.kind != spectra::ModelKind::Flat && !(telecom_filter.fwhm_hz > 0.0)) {
    throw std::invalid_argument("ExperimentModel: telecom filter fwhm must be positive");
  }
  if (red_filter.kind != spectra::ModelKind::Flat && !(red_filter.fwhm_hz > 0.0)) {
    throw std::invalid_argument("ExperimentModel: red filter fwhm must be positive");
  }
  if (!(cross_term_weight >= 0.0 && cross_term_weight <= 1.0)) {
    throw std::invalid_argument("ExperimentModel: cross_term_weight must be in [0, 1]");
  }
}

void DelayScan::write_csv(std::ostream& os) const {
  os << "delay_s,p_cross,p_tt,p_rr\n";
  os.precision(17);
  for (std::size_t i = 0; i < delays_s.size(); ++i) {
    os << delays_s[i] << ',' << (i < p_cross.size() ? p_cross[i] : 0.0) << ','
       << (i < p_tt.size() ? p_tt[i] : 0.0) << ',' << (i < p_rr.size() ? p_rr[i] : 0.0) << '\n';
  }
}

DelayScan cross_color_dip(const ExperimentModel& model, std::span<const double> delays_s,
                          int threads) {
  return run_scan(model, delays_s, threads, true, false);
}

DelayScan same_color_antidips(const ExperimentModel& model, std::span<const double> delays_s,
                              int threads) {
  return run_scan(model, delays_s, threads, false, true);
}

DelayScan full_delay_scan(const ExperimentModel& model, std::span<const double> delays_s,
                          int threads) {
  return run_scan(model, delays_s, threads, true, true);
}

VisibilityResult visibility(const DelayScan& scan, Channel channel) {
  const auto& p = channel_values(scan, channel);
  const auto n = p.size();
  if (n < 10 || scan.delays_s.size() != n) {
    throw AnalysisError("visibility: need a scan with at least 10 points");
  }
  const std::size_t edge = std::max<std::size_t>(1, n / 10);
  double baseline = 0.0;
  for (std::size_t i = 0; i < edge; ++i) baseline += p[i] + p[n - 1 - i];
  baseline /= static_cast<double>(2 * edge);
  if (!(baseline > 0.0)) throw AnalysisError("visibility: non-positive baseline");

  const bool dip = channel == Channel::Cross;
  std::size_t ext = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (dip ? p[i] < p[ext] : p[i] > p[ext]) ext = i;
  }

  VisibilityResult result;
  result.baseline = baseline;
  result.extremum = p[ext];
  result.feature_delay_s = scan.delays_s[ext];
  result.visibility = dip ? (baseline - p[ext]) / baseline : (p[ext] - baseline) / baseline;

  // A featureless scan is trivially covered.
  if (std::abs(p[ext] - baseline) < 1e-12 * baseline) {
    result.visibility = 0.0;
    return result;
  }
  if (ext < edge || ext >= n - edge) {
    throw AnalysisError("visibility: feature extremum inside the baseline window");
  }
  const double width = feature_fwhm(scan, channel);
  const double span = scan.delays_s.back() - scan.delays_s.front();
  if (span < 5.0 * width) {
    throw AnalysisError("visibility: scan does not cover 5x the feature width of baseline");
  }
  return result;
}

double feature_fwhm(const DelayScan& scan, Channel channel) {
  const auto& p = channel_values(scan, channel);
  const auto n = p.size();
  if (n < 5 || scan.delays_s.size() != n) throw AnalysisError("feature_fwhm: scan too short");

  const std::size_t edge = std::max<std::size_t>(1, n / 10);
  double baseline = 0.0;
  for (std::size_t i = 0; i < edge; ++i) baseline += p[i] + p[n - 1 - i];
  baseline /= static_cast<double>(2 * edge);

  const bool dip = channel == Channel::Cross;
  std::size_t ext = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (dip ? p[i] < p[ext] : p[i] > p[ext]) ext = i;
  }
  const double half = 0.5 * (baseline + p[ext]);
  const auto inside = [&](std::size_t i) { return dip ? p[i] < half : p[i] > half; };
  if (!inside(ext)) throw AnalysisError("feature_fwhm: no feature above half depth");

  std::size_t lo = ext;
  while (lo > 0 && inside(lo)) --lo;
  std::size_t hi = ext;
  while (hi < n - 1 && inside(hi)) ++hi;
  if (inside(lo) || inside(hi)) throw AnalysisError("feature_fwhm: no half-depth crossing in scan");

  const auto interp = [&](std::size_t out, std::size_t in) {
    const double frac = (p[in] - half) / (p[in] - p[out]);
    return scan.delays_s[in] + frac * (scan.delays_s[out] - scan.delays_s[in]);
  };
  return interp(hi, hi - 1) - interp(lo, lo + 1);
}

DelayScan oracle_delay_scan(const ExperimentModel& model, std::span<const double> delays_s) {
  model.validate();
  if (model.grid.size() > 512) {
    throw std::invalid_argument("oracle_delay_scan: grid limited to 512 samples");
  }
  if (model.cross_term_weight != 1.0) {
    throw std::invalid_argument("oracle_delay_scan: only the coherent model is supported");
  }

  using fockcore::Complex;
  const auto& grid = model.grid;
  const int n = grid.size();
  const int mid = grid.zero_index();

  const auto f = real_samples(model.source, grid);
  const auto ht = real_samples(model.telecom_filter, grid);
  const auto hr = real_samples(model.red_filter, grid);
  const auto conv = converter::conversion_profile(model.converter, grid);
  const bool pre = model.telecom_placement == FilterPlacement::PreConverter;

  // Single-photon transfer amplitudes of each two-mode coupling, obtained by
  // evolving |1,0> (red in) and |0,1> (telecom in) through the Fock machinery.
  std::vector<Complex> u_rr(static_cast<std::size_t>(n)), u_rt(u_rr), u_tr(u_rr), u_tt(u_rr);
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const double eta = conv.r[k] * conv.r[k];
    const auto bs = fockcore::make_beam_splitter(eta);
    const auto red_in = fockcore::apply_beam_splitter(fockcore::TwoModeFockState::fock(1, 0, 1), bs);
    const auto tel_in = fockcore::apply_beam_splitter(fockcore::TwoModeFockState::fock(0, 1, 1), bs);
    u_rr[k] = red_in.amplitude(1, 0);
    u_rt[k] = red_in.amplitude(0, 1);
    u_tr[k] = tel_in.amplitude(1, 0);
    u_tt[k] = tel_in.amplitude(0, 1);
  }

  // Zero detuning puts both photons into the same two-mode system.
  const auto zero_bs = fockcore::make_beam_splitter(conv.r[static_cast<std::size_t>(mid)] *
                                                    conv.r[static_cast<std::size_t>(mid)]);
  const auto zero_out =
      fockcore::apply_beam_splitter(fockcore::TwoModeFockState::fock(1, 1, 2), zero_bs);
  const Complex zero_cross = zero_out.amplitude(1, 1);
  const Complex zero_rr = zero_out.amplitude(2, 0);
  const Complex zero_tt = zero_out.amplitude(0, 2);

  double norm = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const auto km = static_cast<std::size_t>(grid.mirror_index(i));
    const double detected = f[k] * ht[km] * hr[k];
    norm += detected * detected;
  }
  const double weight = 1.0 / norm;

  DelayScan scan;
  scan.delays_s.assign(delays_s.begin(), delays_s.end());
  scan.p_cross.resize(delays_s.size());
  scan.p_tt.resize(delays_s.size());
  scan.p_rr.resize(delays_s.size());

  for (std::size_t d = 0; d < delays_s.size(); ++d) {
    const double tau = delays_s[d];
    double pc = 0.0, pt = 0.0, pr = 0.0;
    for (int i = mid + 1; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      const auto km = static_cast<std::size_t>(grid.mirror_index(i));
      const double phi = 2.0 * pi * grid.frequency(i) * tau;
      const Complex phase{std::cos(phi), -std::sin(phi)};
      const Complex alpha = f[k] * (pre ? ht[km] : 1.0) * phase;
      const Complex beta = f[km] * (pre ? ht[k] : 1.0) * std::conj(phase);

      const Complex amp_red_i_tel_m = alpha * u_rr[k] * u_tt[km] + beta * u_tr[k] * u_rt[km];
      const Complex amp_tel_i_red_m = alpha * u_rt[k] * u_tr[km] + beta * u_tt[k] * u_rr[km];
      const Complex amp_tel_tel = alpha * u_rt[k] * u_tt[km] + beta * u_tt[k] * u_rt[km];
      const Complex amp_red_red = alpha * u_rr[k] * u_tr[km] + beta * u_tr[k] * u_rr[km];

      pc += std::norm(amp_red_i_tel_m * (pre ? 1.0 : ht[km]) * hr[k]);
      pc += std::norm(amp_tel_i_red_m * (pre ? 1.0 : ht[k]) * hr[km]);
      pt += std::norm(amp_tel_tel * (pre ? 1.0 : ht[k] * ht[km]));
      pr += std::norm(amp_red_red * hr[k] * hr[km]);
    }
    const auto kz = static_cast<std::size_t>(mid);
    const Complex a0 = f[kz] * (pre ? ht[kz] : 1.0);
    pc += std::norm(a0 * zero_cross * (pre ? 1.0 : ht[kz]) * hr[kz]);
    pt += std::norm(a0 * zero_tt * (pre ? 1.0 : ht[kz] * ht[kz]));
    pr += std::norm(a0 * zero_rr * hr[kz] * hr[kz]);

    scan.p_cross[d] = weight * pc;
    scan.p_tt[d] = weight * pt;
    scan.p_rr[d] = weight * pr;
  }
  return scan;
}

double beat_note_resolution(double delta_nu_hz) {
  if (!(delta_nu_hz > 0.0)) {
    throw std::domain_error("beat_note_resolution: frequency difference must be positive");
  }
  return 1.0 / delta_nu_hz;
}

}  // namespace chromahom::interference
