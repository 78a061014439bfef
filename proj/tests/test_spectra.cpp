#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "chromahom/errors.hpp"
#include "chromahom/spectra.hpp"

using namespace chromahom;
using namespace chromahom::spectra;

TEST_CASE("grid is symmetric with exact mirror pairs and a zero sample") {
  const FrequencyGrid g(4096, 2e12);
  CHECK(g.configured_points() == 4096);
  CHECK(g.size() == 4097);  // forced odd
  CHECK(g.frequency(g.zero_index()) == 0.0);
  for (int i : {0, 1, 17, 1000, 2048}) {
    CHECK(g.frequency(g.mirror_index(i)) == -g.frequency(i));
  }
  CHECK(g.frequency(0) == doctest::Approx(-1e12));
  CHECK(g.frequency(g.size() - 1) == doctest::Approx(1e12));

  const FrequencyGrid odd(257, 1e12);
  CHECK(odd.size() == 257);

  CHECK_THROWS_AS(FrequencyGrid(4, 1e12), std::invalid_argument);
  CHECK_THROWS_AS(FrequencyGrid(4096, -1.0), std::invalid_argument);
}

TEST_CASE("sinc half-intensity point") {
  const double x = sinc_half_intensity_point();
  CHECK(x == doctest::Approx(1.39155737825151).epsilon(1e-12));
  const double s = std::sin(x) / x;
  CHECK(s * s == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("gaussian model round-trips its FWHM") {
  const FrequencyGrid g(4096, 2e12);
  const auto s = sample_model({ModelKind::Gaussian, 105e9}, g);
  CHECK(std::abs(measure_fwhm(s) - 105e9) < g.spacing());
  CHECK(s.amp[static_cast<std::size_t>(g.zero_index())].real() == 1.0);
}

TEST_CASE("fwhm round trip for both kinds across bandwidths") {
  for (double fwhm_ghz : {10.0, 75.0, 105.0, 110.0, 300.0}) {
    const double fwhm = fwhm_ghz * 1e9;
    const FrequencyGrid g(8192, std::max(2e12, 10.0 * fwhm));
    for (ModelKind kind : {ModelKind::Gaussian, ModelKind::Sinc}) {
      const auto s = sample_model({kind, fwhm}, g);
      CHECK(std::abs(measure_fwhm(s) - fwhm) < g.spacing());
    }
  }
}

TEST_CASE("flat model is constant and has no half-maximum crossing") {
  const FrequencyGrid g(512, 1e12);
  const auto s = sample_model({ModelKind::Flat, 0.0}, g);
  for (const auto& a : s.amp) CHECK(a == std::complex<double>{1.0, 0.0});
  CHECK_THROWS_AS(measure_fwhm(s), AnalysisError);
}

TEST_CASE("sinc first zero lands at the predicted detuning") {
  const FrequencyGrid g(16384, 2e12);
  const auto s = sample_model({ModelKind::Sinc, 75e9}, g);
  // First sign change right of the center.
  const double expected = 84.6603426857217e9;
  int i = g.zero_index();
  while (i < g.size() - 1 && s.amp[static_cast<std::size_t>(i)].real() > 0.0) ++i;
  const double y1 = s.amp[static_cast<std::size_t>(i - 1)].real();
  const double y2 = s.amp[static_cast<std::size_t>(i)].real();
  const double zero =
      g.frequency(i - 1) + y1 / (y1 - y2) * (g.frequency(i) - g.frequency(i - 1));
  CHECK(std::abs(zero - expected) < g.spacing());
}

TEST_CASE("span must cover 8x the model FWHM") {
  const FrequencyGrid g(512, 0.5e12);
  CHECK_THROWS_AS(sample_model({ModelKind::Sinc, 75e9}, g), ConfigError);
  CHECK_THROWS_AS(sample_model({ModelKind::Gaussian, -1.0}, FrequencyGrid(512, 1e12)),
                  std::invalid_argument);
}

TEST_CASE("multiply is commutative and associative, with flat identity") {
  const FrequencyGrid g(512, 2e12);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SpectralAmplitude a{g, {}}, b{g, {}}, c{g, {}};
  for (int i = 0; i < g.size(); ++i) {
    a.amp.push_back({u(rng), u(rng)});
    b.amp.push_back({u(rng), u(rng)});
    c.amp.push_back({u(rng), u(rng)});
  }
  const auto ab = multiply(a, b);
  const auto ba = multiply(b, a);
  const auto ab_c = multiply(ab, c);
  const auto a_bc = multiply(a, multiply(b, c));
  for (std::size_t i = 0; i < a.amp.size(); ++i) {
    CHECK(std::abs(ab.amp[i] - ba.amp[i]) < 1e-12);
    CHECK(std::abs(ab_c.amp[i] - a_bc.amp[i]) < 1e-12);
  }

  const auto flat = sample_model({ModelKind::Flat, 0.0}, g);
  const auto a_flat = multiply(a, flat);
  for (std::size_t i = 0; i < a.amp.size(); ++i) CHECK(a_flat.amp[i] == a.amp[i]);

  CHECK_THROWS_AS(multiply(a, sample_model({ModelKind::Flat, 0.0}, FrequencyGrid(256, 2e12))),
                  std::invalid_argument);
}

TEST_CASE("product of two gaussians has the combined width") {
  const FrequencyGrid g(8192, 2e12);
  const auto p = multiply(sample_model({ModelKind::Gaussian, 105e9}, g),
                          sample_model({ModelKind::Gaussian, 110e9}, g));
  CHECK(std::abs(measure_fwhm(p) - 75.9523321350751e9) < g.spacing());
}

TEST_CASE("gaussian filtering suppresses sinc sidelobes") {
  const FrequencyGrid g(8192, 2e12);
  const auto p = multiply(sample_model({ModelKind::Sinc, 75e9}, g),
                          sample_model({ModelKind::Gaussian, 105e9}, g));
  CHECK(measure_fwhm(p) < 75e9);
  // Peak sidelobe intensity beyond the first zero.
  const double first_zero = 84.6603426857217e9;
  double peak_side = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    if (std::abs(g.frequency(i)) > first_zero) peak_side = std::max(peak_side, p.intensity(i));
  }
  CHECK(peak_side < 1e-2 * p.intensity(g.zero_index()));
}

TEST_CASE("normalize is idempotent and scale invariant") {
  const FrequencyGrid g(4096, 2e12);
  const auto s = sample_model({ModelKind::Sinc, 75e9}, g);
  const auto n1 = normalize(s);
  double sq = 0.0;
  for (const auto& a : n1.amp) sq += std::norm(a);
  CHECK(sq * g.spacing() == doctest::Approx(1.0).epsilon(1e-12));

  const auto n2 = normalize(n1);
  SpectralAmplitude doubled = n1;
  for (auto& a : doubled.amp) a *= 2.0;
  const auto n3 = normalize(doubled);
  for (std::size_t i = 0; i < n1.amp.size(); ++i) {
    CHECK(std::abs(n2.amp[i] - n1.amp[i]) < 1e-12);
    CHECK(std::abs(n3.amp[i] - n1.amp[i]) < 1e-12);
  }

  SpectralAmplitude zero{g, std::vector<std::complex<double>>(static_cast<std::size_t>(g.size()))};
  CHECK_THROWS_AS(normalize(zero), std::domain_error);
}

TEST_CASE("csv export carries detuning and both components") {
  const FrequencyGrid g(16, 1e10);
  auto s = sample_model({ModelKind::Flat, 0.0}, g);
  s.amp[0] = {0.25, -0.5};
  std::ostringstream os;
  write_csv(s, os);
  std::istringstream is(os.str());
  std::string header;
  std::getline(is, header);
  CHECK(header == "detuning_hz,re,im");
  double f, re, im;
  char comma;
  is >> f >> comma >> re >> comma >> im;
  CHECK(f == doctest::Approx(-5e9));
  CHECK(re == doctest::Approx(0.25));
  CHECK(im == doctest::Approx(-0.5));
}
