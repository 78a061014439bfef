#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "chromahom/fitkit.hpp"

// Monte Carlo generation of four-detector time tags from per-pair outcome
// probabilities, and the correlator turning tag streams into coincidence
// histograms, peak areas and accidental-corrected dip scans. Time is integer
// picoseconds throughout: the features of interest are several picoseconds
// wide and integer time keeps the correlation exact and portable.

namespace chromahom::tagsim {

// The telecom output splitter feeds the two SNSPDs, the red output splitter
// the two APDs.
enum class Channel : std::uint8_t { SnspdA = 0, SnspdB = 1, ApdA = 2, ApdB = 3 };

inline constexpr int kChannelCount = 4;

std::string_view channel_name(Channel c);
std::optional<Channel> channel_from_name(std::string_view name);

struct TimeTag {
  Channel channel;
  std::int64_t time_ps;

  friend bool operator==(const TimeTag&, const TimeTag&) = default;
};

struct ChannelSet {
  std::uint8_t mask = 0;

  ChannelSet() = default;
  ChannelSet(std::initializer_list<Channel> channels) {
    for (Channel c : channels) mask |= static_cast<std::uint8_t>(1u << static_cast<int>(c));
  }
  bool contains(Channel c) const {
    return mask & static_cast<std::uint8_t>(1u << static_cast<int>(c));
  }
};

inline const ChannelSet kSnspds{Channel::SnspdA, Channel::SnspdB};
inline const ChannelSet kApds{Channel::ApdA, Channel::ApdB};

struct DetectionConfig {
  double eff_snspd = 0.90;
  double eff_apd = 0.35;
  // Source collection per arm, applied by the photon's color at emission.
  double collection_red = 0.57;
  double collection_telecom = 0.33;
  // Applied once per photon traversing the converter setup.
  double converter_transmission = 0.46;
  // Indexed by Channel. Dark/background click rate per detector.
  std::array<double, 4> dark_rate_hz{0.0, 0.0, 0.0, 0.0};
  // Indexed by Channel. Assumed detector timing jitter; representative
  // values, not measured figures.
  std::array<double, 4> jitter_fwhm_ps{30.0, 30.0, 50.0, 50.0};
  double splitter_ratio = 0.5;

  void validate() const;
};

// Per-pair outcome distribution. A pair is one red-emitted and one
// telecom-emitted photon; cross_stay keeps both colors, cross_swap flips
// both, tt/rr put both photons into one color. Remainder up to 1 is a lost
// pair.
struct OutcomeProbs {
  double cross_stay = 0.0;
  double cross_swap = 0.0;
  double tt = 0.0;
  double rr = 0.0;

  // Large-delay (no interference) splitting of a converter with transition
  // probability eta.
  static OutcomeProbs incoherent(double eta);
  // Splits an interference-scan point into stay/swap by the incoherent path
  // weights (1-eta0)^2 : eta0^2; the split only shifts picosecond-scale tag
  // times, not which outcome occurs.
  static OutcomeProbs from_scan_point(double p_cross, double p_tt, double p_rr, double eta0);

  double sum() const { return cross_stay + cross_swap + tt + rr; }
  void validate() const;
};

// Pair emission is a Poisson process of the given rate. The telecom-emitted
// photon of each pair carries telecom_arm_delay_ps; swapped and unswapped
// cross pairs therefore produce coincidence peaks separated by twice the arm
// delay. Deterministic for a fixed seed; tags are time-ordered; tags jittered
// to negative times are dropped.
std::vector<TimeTag> generate_run(const OutcomeProbs& probs, double pair_rate_hz,
                                  double duration_s, const DetectionConfig& config,
                                  std::uint64_t seed, std::int64_t telecom_arm_delay_ps = 0);

struct CoincidenceHistogram {
  std::int64_t bin_width_ps = 1;
  // Bin centers run from -half_bins*bin_width to +half_bins*bin_width.
  std::int64_t half_bins = 0;
  std::vector<std::uint64_t> counts;

  int bin_count() const { return static_cast<int>(2 * half_bins + 1); }
  std::int64_t offset_ps(int bin) const { return (bin - half_bins) * bin_width_ps; }
  std::uint64_t total() const;

  void write_csv(std::ostream& os) const;
};

// Streaming pairwise correlator: histogram of t_b - t_a over all (a, b) tag
// pairs within the histogram extent. Feeding a stream in chunks yields the
// identical histogram as one pass; counts are exact.
class StreamingCorrelator {
 public:
  StreamingCorrelator(ChannelSet group_a, ChannelSet group_b, std::int64_t window_ps,
                      std::int64_t bin_width_ps);

  void feed(std::span<const TimeTag> tags);
  CoincidenceHistogram finish();

 private:
  void bin(std::int64_t dt);

  ChannelSet group_a_;
  ChannelSet group_b_;
  std::int64_t accept_ps_;
  std::int64_t last_time_;
  bool any_tag_ = false;
  CoincidenceHistogram hist_;
  std::vector<std::int64_t> recent_a_;
  std::vector<std::int64_t> recent_b_;
  std::size_t head_a_ = 0;
  std::size_t head_b_ = 0;
};

CoincidenceHistogram correlate(std::span<const TimeTag> tags, ChannelSet group_a,
                               ChannelSet group_b, std::int64_t window_ps,
                               std::int64_t bin_width_ps);

struct PeakIntegration {
  double p1 = 0.0;  // background-subtracted counts around center1
  double p2 = 0.0;  // background-subtracted counts around center2
  double background_per_bin = 0.0;
};

// Background is the mean count of the bins outside both peak windows. Throws
// AnalysisError for overlapping windows or when no sideband bins remain.
PeakIntegration integrate_peaks(const CoincidenceHistogram& h, std::int64_t center1_ps,
                                std::int64_t center2_ps, std::int64_t half_width_ps);

struct PeakCounts {
  double raw = 0.0;  // total counts in the peak window
  double net = 0.0;  // background-subtracted
  double background_per_bin = 0.0;
  int bins = 0;
};

PeakCounts integrate_single_peak(const CoincidenceHistogram& h, std::int64_t center_ps,
                                 std::int64_t half_width_ps);

struct CorrectedScanVisibility {
  fitkit::GaussianDipFit raw_fit;
  fitkit::GaussianDipFit corrected_fit;
  std::vector<double> raw_counts;
  std::vector<double> corrected_counts;
};

// Per-delay peak integration of a histogram scan followed by Gaussian dip
// fits of raw (total) and accidental-corrected (sideband-subtracted) counts.
CorrectedScanVisibility accidental_corrected_visibility(
    std::span<const double> delays_s, std::span<const CoincidenceHistogram> histograms,
    std::int64_t peak_center_ps, std::int64_t peak_half_width_ps,
    const fitkit::FitOptions& fit_options = {fitkit::Weighting::Poisson});

// Binary tag format: 16-byte header (magic "CHTG", u16 version = 1, 10
// reserved zero bytes), then little-endian records of u8 channel, u64
// time_ps.
void write_tags_binary(std::span<const TimeTag> tags, std::ostream& os);
std::vector<TimeTag> read_tags_binary(std::istream& is);

// Columns: channel, time_ps.
void write_tags_csv(std::span<const TimeTag> tags, std::ostream& os);
std::vector<TimeTag> read_tags_csv(std::istream& is);

}  // namespace chromahom::tagsim
