#include "chromahom/tagsim.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "chromahom/errors.hpp"

namespace chromahom::tagsim {

namespace {

// mt19937_64 output is fully specified by the standard; the distributions are
// hand-rolled on top of it so identical seeds give identical tag streams on
// every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double exponential(double mean) { return -mean * std::log1p(-uniform()); }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log1p(-uniform()));
    const double theta = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

constexpr double kFwhmToSigma = 1.0 / 2.3548200450309493;  // 1 / (2 sqrt(2 ln2))

enum class Color { Red, Telecom };

struct PhotonFate {
  bool detected = false;
  Channel channel = Channel::SnspdA;
  std::int64_t time_ps = 0;
};

PhotonFate route_photon(Rng& rng, const DetectionConfig& cfg, Color emitted, Color final_color,
                        double time_ps) {
  PhotonFate fate;
  const double collection =
      emitted == Color::Red ? cfg.collection_red : cfg.collection_telecom;
  if (rng.uniform() >= collection * cfg.converter_transmission) return fate;

  const bool first_port = rng.uniform() < cfg.splitter_ratio;
  const Channel channel =
      final_color == Color::Telecom ? (first_port ? Channel::SnspdA : Channel::SnspdB)
                                    : (first_port ? Channel::ApdA : Channel::ApdB);
  const double eff = final_color == Color::Telecom ? cfg.eff_snspd : cfg.eff_apd;
  if (rng.uniform() >= eff) return fate;

  const double sigma = cfg.jitter_fwhm_ps[static_cast<std::size_t>(channel)] * kFwhmToSigma;
  const double jittered = time_ps + (sigma > 0.0 ? sigma * rng.normal() : 0.0);
  fate.detected = true;
  fate.channel = channel;
  fate.time_ps = std::llround(jittered);
  return fate;
}

}  // namespace

std::string_view channel_name(Channel c) {
  switch (c) {
    case Channel::SnspdA:
      return "snspd_a";
    case Channel::SnspdB:
      return "snspd_b";
    case Channel::ApdA:
      return "apd_a";
    case Channel::ApdB:
      return "apd_b";
  }
  return "unknown";
}

std::optional<Channel> channel_from_name(std::string_view name) {
  for (int i = 0; i < kChannelCount; ++i) {
    const auto c = static_cast<Channel>(i);
    if (channel_name(c) == name) return c;
  }
  return std::nullopt;
}

void DetectionConfig::validate() const {
  const auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!unit(eff_snspd) || !unit(eff_apd) || !unit(collection_red) || !unit(collection_telecom) ||
      !unit(converter_transmission) || !unit(splitter_ratio)) {
    throw ConfigError("DetectionConfig: efficiencies and ratios must be in [0, 1]");
  }
  for (double r : dark_rate_hz) {
    if (!(r >= 0.0)) throw ConfigError("DetectionConfig: dark rates must be non-negative");
  }
  for (double j : jitter_fwhm_ps) {
    if (!(j >= 0.0)) throw ConfigError("DetectionConfig: jitter must be non-negative");
  }
}

OutcomeProbs OutcomeProbs::incoherent(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw ConfigError("OutcomeProbs: eta must be in [0, 1]");
  OutcomeProbs p;
  p.cross_stay = (1.0 - eta) * (1.0 - eta);
  p.cross_swap = eta * eta;
  p.tt = eta * (1.0 - eta);
  p.rr = eta * (1.0 - eta);
  return p;
}

OutcomeProbs OutcomeProbs::from_scan_point(double p_cross, double p_tt, double p_rr, double eta0) {
  const double w_stay = (1.0 - eta0) * (1.0 - eta0);
  const double w_swap = eta0 * eta0;
  const double w = w_stay + w_swap;
  OutcomeProbs p;
  p.cross_stay = w > 0.0 ? p_cross * w_stay / w : 0.5 * p_cross;
  p.cross_swap = p_cross - p.cross_stay;
  p.tt = p_tt;
  p.rr = p_rr;
  p.validate();
  return p;
}

void OutcomeProbs::validate() const {
  const auto bad = [](double v) { return !(v >= 0.0 && v <= 1.0); };
  if (bad(cross_stay) || bad(cross_swap) || bad(tt) || bad(rr) || sum() > 1.0 + 1e-9) {
    throw ConfigError("OutcomeProbs: invalid outcome distribution");
  }
}

std::vector<TimeTag> generate_run(const OutcomeProbs& probs, double pair_rate_hz,
                                  double duration_s, const DetectionConfig& config,
                                  std::uint64_t seed, std::int64_t telecom_arm_delay_ps) {
  probs.validate();
  config.validate();
  if (!(pair_rate_hz > 0.0) || !(duration_s > 0.0) || pair_rate_hz * duration_s < 100.0) {
    throw ConfigError("generate_run: need pair_rate * duration >= 100 pairs");
  }

  Rng rng(seed);
  std::vector<TimeTag> tags;
  tags.reserve(static_cast<std::size_t>(pair_rate_hz * duration_s * 0.5) + 64);

  const double c1 = probs.cross_stay;
  const double c2 = c1 + probs.cross_swap;
  const double c3 = c2 + probs.tt;
  const double c4 = c3 + probs.rr;

  for (double t = rng.exponential(1.0 / pair_rate_hz); t < duration_s;
       t += rng.exponential(1.0 / pair_rate_hz)) {
    const double u = rng.uniform();
    if (u >= c4) continue;  // pair lost before the converter output

    Color final_red_emitted;      // final color of the red-emitted photon
    Color final_telecom_emitted;  // final color of the telecom-emitted photon
    if (u < c1) {
      final_red_emitted = Color::Red;
      final_telecom_emitted = Color::Telecom;
    } else if (u < c2) {
      final_red_emitted = Color::Telecom;
      final_telecom_emitted = Color::Red;
    } else if (u < c3) {
      final_red_emitted = Color::Telecom;
      final_telecom_emitted = Color::Telecom;
    } else {
      final_red_emitted = Color::Red;
      final_telecom_emitted = Color::Red;
    }

    const double emission_ps = t * 1e12;
    const PhotonFate red_emitted =
        route_photon(rng, config, Color::Red, final_red_emitted, emission_ps);
    const PhotonFate telecom_emitted =
        route_photon(rng, config, Color::Telecom, final_telecom_emitted,
                     emission_ps + static_cast<double>(telecom_arm_delay_ps));
    if (red_emitted.detected && red_emitted.time_ps >= 0) {
      tags.push_back({red_emitted.channel, red_emitted.time_ps});
    }
    if (telecom_emitted.detected && telecom_emitted.time_ps >= 0) {
      tags.push_back({telecom_emitted.channel, telecom_emitted.time_ps});
    }
  }

  // Independent dark/background clicks per detector.
  for (int c = 0; c < kChannelCount; ++c) {
    const double rate = config.dark_rate_hz[static_cast<std::size_t>(c)];
    if (!(rate > 0.0)) continue;
    for (double t = rng.exponential(1.0 / rate); t < duration_s;
         t += rng.exponential(1.0 / rate)) {
      tags.push_back({static_cast<Channel>(c), std::llround(t * 1e12)});
    }
  }

  std::stable_sort(tags.begin(), tags.end(),
                   [](const TimeTag& a, const TimeTag& b) { return a.time_ps < b.time_ps; });
  return tags;
}

std::uint64_t CoincidenceHistogram::total() const {
  std::uint64_t s = 0;
  for (std::uint64_t c : counts) s += c;
  return s;
}

void CoincidenceHistogram::write_csv(std::ostream& os) const {
  os << "offset_ps,counts\n";
  for (int i = 0; i < bin_count(); ++i) {
    os << offset_ps(i) << ',' << counts[static_cast<std::size_t>(i)] << '\n';
  }
}

StreamingCorrelator::StreamingCorrelator(ChannelSet group_a, ChannelSet group_b,
                                         std::int64_t window_ps, std::int64_t bin_width_ps)
    : group_a_(group_a), group_b_(group_b), last_time_(0) {
  if (bin_width_ps < 1) throw std::invalid_argument("correlate: bin width must be >= 1 ps");
  if (window_ps < bin_width_ps) throw std::invalid_argument("correlate: window must cover a bin");
  if (group_a.mask & group_b.mask) {
    throw std::invalid_argument("correlate: channel groups must be disjoint");
  }
  hist_.bin_width_ps = bin_width_ps;
  hist_.half_bins = window_ps / bin_width_ps;
  hist_.counts.assign(static_cast<std::size_t>(hist_.bin_count()), 0);
  // Largest |dt| that still rounds into the outermost bin.
  accept_ps_ = hist_.half_bins * bin_width_ps + (bin_width_ps - 1 - bin_width_ps / 2);
}

void StreamingCorrelator::bin(std::int64_t dt) {
  const std::int64_t bw = hist_.bin_width_ps;
  const std::int64_t idx =
      dt >= 0 ? (dt + bw / 2) / bw : -((-dt + bw / 2) / bw);  // round half away from zero
  hist_.counts[static_cast<std::size_t>(idx + hist_.half_bins)] += 1;
}

void StreamingCorrelator::feed(std::span<const TimeTag> tags) {
  const auto compact = [](std::vector<std::int64_t>& buf, std::size_t& head) {
    if (head > 4096 && head > buf.size() / 2) {
      buf.erase(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(head));
      head = 0;
    }
  };

  for (const TimeTag& tag : tags) {
    if (any_tag_ && tag.time_ps < last_time_) {
      throw std::invalid_argument("correlate: tags must be in non-decreasing time order");
    }
    any_tag_ = true;
    last_time_ = tag.time_ps;
    const std::int64_t limit = tag.time_ps - accept_ps_;

    if (group_a_.contains(tag.channel)) {
      while (head_b_ < recent_b_.size() && recent_b_[head_b_] < limit) ++head_b_;
      compact(recent_b_, head_b_);
      for (std::size_t i = head_b_; i < recent_b_.size(); ++i) {
        bin(recent_b_[i] - tag.time_ps);
      }
      recent_a_.push_back(tag.time_ps);
    } else if (group_b_.contains(tag.channel)) {
      while (head_a_ < recent_a_.size() && recent_a_[head_a_] < limit) ++head_a_;
      compact(recent_a_, head_a_);
      for (std::size_t i = head_a_; i < recent_a_.size(); ++i) {
        bin(tag.time_ps - recent_a_[i]);
      }
      recent_b_.push_back(tag.time_ps);
    }
  }
}

CoincidenceHistogram StreamingCorrelator::finish() { return hist_; }

CoincidenceHistogram correlate(std::span<const TimeTag> tags, ChannelSet group_a,
                               ChannelSet group_b, std::int64_t window_ps,
                               std::int64_t bin_width_ps) {
  StreamingCorrelator corr(group_a, group_b, window_ps, bin_width_ps);
  corr.feed(tags);
  return corr.finish();
}

namespace {

struct BinWindow {
  int first = 0;
  int last = -1;  // inclusive
  int size() const { return last - first + 1; }
};

BinWindow window_bins(const CoincidenceHistogram& h, std::int64_t center_ps,
                      std::int64_t half_width_ps) {
  BinWindow w;
  w.first = h.bin_count();
  w.last = -1;
  for (int i = 0; i < h.bin_count(); ++i) {
    const std::int64_t off = h.offset_ps(i);
    if (off >= center_ps - half_width_ps && off <= center_ps + half_width_ps) {
      w.first = std::min(w.first, i);
      w.last = std::max(w.last, i);
    }
  }
  return w;
}

double sum_window(const CoincidenceHistogram& h, const BinWindow& w) {
  double s = 0.0;
  for (int i = w.first; i <= w.last; ++i) s += static_cast<double>(h.counts[static_cast<std::size_t>(i)]);
  return s;
}

}  // namespace

PeakIntegration integrate_peaks(const CoincidenceHistogram& h, std::int64_t center1_ps,
                                std::int64_t center2_ps, std::int64_t half_width_ps) {
  if (std::abs(center1_ps - center2_ps) <= 2 * half_width_ps) {
    throw AnalysisError("integrate_peaks: peak windows overlap");
  }
  const BinWindow w1 = window_bins(h, center1_ps, half_width_ps);
  const BinWindow w2 = window_bins(h, center2_ps, half_width_ps);
  if (w1.size() <= 0 || w2.size() <= 0) {
    throw AnalysisError("integrate_peaks: peak window outside the histogram");
  }

  double outside = 0.0;
  int outside_bins = 0;
  for (int i = 0; i < h.bin_count(); ++i) {
    if ((i >= w1.first && i <= w1.last) || (i >= w2.first && i <= w2.last)) continue;
    outside += static_cast<double>(h.counts[static_cast<std::size_t>(i)]);
    ++outside_bins;
  }
  if (outside_bins == 0) throw AnalysisError("integrate_peaks: no sideband bins for background");

  PeakIntegration out;
  out.background_per_bin = outside / outside_bins;
  out.p1 = sum_window(h, w1) - out.background_per_bin * w1.size();
  out.p2 = sum_window(h, w2) - out.background_per_bin * w2.size();
  return out;
}

PeakCounts integrate_single_peak(const CoincidenceHistogram& h, std::int64_t center_ps,
                                 std::int64_t half_width_ps) {
  const BinWindow w = window_bins(h, center_ps, half_width_ps);
  if (w.size() <= 0) throw AnalysisError("integrate_single_peak: window outside the histogram");

  double outside = 0.0;
  int outside_bins = 0;
  for (int i = 0; i < h.bin_count(); ++i) {
    if (i >= w.first && i <= w.last) continue;
    outside += static_cast<double>(h.counts[static_cast<std::size_t>(i)]);
    ++outside_bins;
  }
  if (outside_bins == 0) {
    throw AnalysisError("integrate_single_peak: no sideband bins for background");
  }

  PeakCounts out;
  out.bins = w.size();
  out.raw = sum_window(h, w);
  out.background_per_bin = outside / outside_bins;
  out.net = out.raw - out.background_per_bin * w.size();
  return out;
}

CorrectedScanVisibility accidental_corrected_visibility(
    std::span<const double> delays_s, std::span<const CoincidenceHistogram> histograms,
    std::int64_t peak_center_ps, std::int64_t peak_half_width_ps,
    const fitkit::FitOptions& fit_options) {
  if (delays_s.size() != histograms.size() || delays_s.size() < 8) {
    throw AnalysisError("accidental_corrected_visibility: need >= 8 delay points");
  }
  CorrectedScanVisibility out;
  out.raw_counts.reserve(delays_s.size());
  out.corrected_counts.reserve(delays_s.size());
  for (const auto& h : histograms) {
    const PeakCounts pk = integrate_single_peak(h, peak_center_ps, peak_half_width_ps);
    out.raw_counts.push_back(pk.raw);
    out.corrected_counts.push_back(pk.net);
  }
  out.raw_fit = fitkit::fit_gaussian_feature(delays_s, out.raw_counts, {}, fit_options);
  out.corrected_fit = fitkit::fit_gaussian_feature(delays_s, out.corrected_counts, {}, fit_options);
  return out;
}

namespace {

constexpr char kMagic[4] = {'C', 'H', 'T', 'G'};
constexpr std::uint16_t kVersion = 1;
constexpr std::size_t kHeaderSize = 16;

void put_u64_le(std::string& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

}  // namespace

void write_tags_binary(std::span<const TimeTag> tags, std::ostream& os) {
  std::string buf;
  buf.reserve(kHeaderSize + tags.size() * 9);
  buf.append(kMagic, 4);
  buf.push_back(static_cast<char>(kVersion & 0xff));
  buf.push_back(static_cast<char>(kVersion >> 8));
  buf.append(10, '\0');
  for (const TimeTag& t : tags) {
    if (t.time_ps < 0) throw std::invalid_argument("write_tags_binary: negative time");
    buf.push_back(static_cast<char>(t.channel));
    put_u64_le(buf, static_cast<std::uint64_t>(t.time_ps));
  }
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

std::vector<TimeTag> read_tags_binary(std::istream& is) {
  char header[kHeaderSize];
  is.read(header, kHeaderSize);
  if (is.gcount() != kHeaderSize || std::memcmp(header, kMagic, 4) != 0) {
    throw ConfigError("read_tags_binary: not a chromahom tag file");
  }
  const auto version = static_cast<std::uint16_t>(
      static_cast<unsigned char>(header[4]) | (static_cast<unsigned char>(header[5]) << 8));
  if (version != kVersion) {
    throw ConfigError("read_tags_binary: unsupported tag file version");
  }

  std::vector<TimeTag> tags;
  char rec[9];
  while (is.read(rec, 9)) {
    std::uint64_t t = 0;
    for (int i = 0; i < 8; ++i) {
      t |= static_cast<std::uint64_t>(static_cast<unsigned char>(rec[1 + i])) << (8 * i);
    }
    const auto ch = static_cast<unsigned char>(rec[0]);
    if (ch >= kChannelCount) throw ConfigError("read_tags_binary: bad channel id");
    tags.push_back({static_cast<Channel>(ch), static_cast<std::int64_t>(t)});
  }
  if (is.gcount() != 0) throw ConfigError("read_tags_binary: truncated record");
  return tags;
}

void write_tags_csv(std::span<const TimeTag> tags, std::ostream& os) {
  os << "channel,time_ps\n";
  for (const TimeTag& t : tags) {
    os << channel_name(t.channel) << ',' << t.time_ps << '\n';
  }
}

std::vector<TimeTag> read_tags_csv(std::istream& is) {
  std::vector<TimeTag> tags;
  std::string line;
  if (!std::getline(is, line) || line.rfind("channel,time_ps", 0) != 0) {
    throw ConfigError("read_tags_csv: missing header");
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError("read_tags_csv: malformed line");
    const auto channel = channel_from_name(line.substr(0, comma));
    if (!channel) throw ConfigError("read_tags_csv: unknown channel name");
    tags.push_back({*channel, std::stoll(line.substr(comma + 1))});
  }
  return tags;
}

}  // namespace chromahom::tagsim
