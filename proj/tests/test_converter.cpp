#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "chromahom/converter.hpp"
#include "chromahom/errors.hpp"
#include "chromahom/fockcore.hpp"

using namespace chromahom;
using namespace chromahom::converter;

TEST_CASE("transition probability calibration curve") {
  const PumpCalibration cal{};
  CHECK(transition_probability(149.0, cal) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(transition_probability(0.0, cal) == 0.0);
  CHECK(transition_probability(35.0, cal) ==
        doctest::Approx(0.47591980628191237).epsilon(1e-12));
  CHECK(transition_probability(37.2, cal) ==
        doctest::Approx(0.49947271023407201).epsilon(1e-12));

  CHECK_THROWS_AS(transition_probability(-1.0, cal), std::domain_error);
  CHECK_THROWS_AS(transition_probability(150.0, cal), std::domain_error);

  // Monotone on the fitted branch.
  double prev = -1.0;
  for (int i = 0; i <= 200; ++i) {
    const double eta = transition_probability(149.0 * i / 200.0, cal);
    CHECK(eta >= prev);
    prev = eta;
  }
}

TEST_CASE("balance pump power inverts the calibration curve") {
  const PumpCalibration cal{};
  CHECK(balance_pump_power(0.5, cal) == doctest::Approx(37.25).epsilon(1e-12));
  CHECK(balance_pump_power(1.0, cal) == doctest::Approx(149.0).epsilon(1e-12));
  CHECK(balance_pump_power(0.476, cal) == doctest::Approx(35.0073824937151).epsilon(1e-12));

  for (int i = 0; i <= 500; ++i) {
    const double eta = i / 500.0;
    CHECK(std::abs(transition_probability(balance_pump_power(eta, cal), cal) - eta) < 1e-12);
  }
  CHECK_THROWS_AS(balance_pump_power(1.5, cal), std::domain_error);
}

TEST_CASE("p_max rescales the curve in power only") {
  const PumpCalibration a{149.0, 50.0};
  const PumpCalibration b{42.0, 50.0};
  for (double frac : {0.0, 0.1, 0.45, 0.99}) {
    CHECK(transition_probability(frac * a.p_max_watts, a) ==
          doctest::Approx(transition_probability(frac * b.p_max_watts, b)).epsilon(1e-14));
  }
}

TEST_CASE("conversion profile is pointwise unitary") {
  const spectra::FrequencyGrid g(1024, 2e12);
  for (ProfileKind kind : {ProfileKind::Sinc2, ProfileKind::Gaussian, ProfileKind::Flat}) {
    const ConverterModel m{0.476, 110e9, kind, 0.0};
    const auto prof = conversion_profile(m, g);
    for (int i = 0; i < g.size(); ++i) {
      const auto k = static_cast<std::size_t>(i);
      CHECK(std::abs(prof.t[k] * prof.t[k] + prof.r[k] * prof.r[k] - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("flat profile with eta0 = 0.5 is balanced everywhere") {
  const spectra::FrequencyGrid g(512, 2e12);
  const auto prof = conversion_profile({0.5, 110e9, ProfileKind::Flat, 0.0}, g);
  for (int i = 0; i < g.size(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    CHECK(prof.t[k] == doctest::Approx(prof.r[k]).epsilon(1e-14));
  }
}

TEST_CASE("sinc2 profile peaks at eta0 and halves at +-FWHM/2") {
  // 55 GHz falls on a grid point for this span/count.
  const spectra::FrequencyGrid g(401, 2.2e12);
  const ConverterModel m{0.476, 110e9, ProfileKind::Sinc2, 0.0};
  const auto prof = conversion_profile(m, g);
  const int mid = g.zero_index();
  CHECK(prof.r[static_cast<std::size_t>(mid)] * prof.r[static_cast<std::size_t>(mid)] ==
        doctest::Approx(0.476).epsilon(1e-12));
  int at55 = -1;
  for (int i = 0; i < g.size(); ++i) {
    if (std::abs(g.frequency(i) - 55e9) < 1e-3) at55 = i;
  }
  REQUIRE(at55 >= 0);
  const double eta55 = prof.r[static_cast<std::size_t>(at55)] * prof.r[static_cast<std::size_t>(at55)];
  CHECK(eta55 == doctest::Approx(0.238).epsilon(1e-9));
}

TEST_CASE("pump detuning shifts the profile center") {
  const spectra::FrequencyGrid g(801, 2.2e12);
  const ConverterModel m{0.7, 110e9, ProfileKind::Gaussian, 27.5e9};
  const auto prof = conversion_profile(m, g);
  double best = -1.0;
  double at = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (prof.r[k] > best) {
      best = prof.r[k];
      at = g.frequency(i);
    }
  }
  CHECK(at == doctest::Approx(27.5e9).epsilon(1e-6));
}

TEST_CASE("eta estimator from peak areas") {
  CHECK(eta_from_peak_ratio(100.0, 100.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(eta_from_peak_ratio(0.0, 100.0) == 0.0);
  const double ratio = 0.825185012528407;  // (0.476 / 0.524)^2
  CHECK(eta_from_peak_ratio(ratio, 1.0) == doctest::Approx(0.476).epsilon(1e-12));
  CHECK_THROWS_AS(eta_from_peak_ratio(1.0, 0.0), AnalysisError);
  CHECK_THROWS_AS(eta_from_peak_ratio(-1.0, 1.0), AnalysisError);
}

TEST_CASE("peak-ratio estimator is exact and scale invariant") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> eta_dist(0.0, 0.999);
  std::uniform_real_distribution<double> scale_dist(1e-3, 1e6);
  for (int i = 0; i < 200; ++i) {
    const double eta = eta_dist(rng);
    const double k = scale_dist(rng);
    const double p2 = eta * eta * k;
    const double p1 = (1.0 - eta) * (1.0 - eta) * k;
    CHECK(std::abs(eta_from_peak_ratio(p2, p1) - eta) < 1e-12);
  }
}

TEST_CASE("balanced operating point stays inside the visibility-bound window") {
  const double eta = transition_probability(35.0, PumpCalibration{});
  const double bound = fockcore::max_visibility_bound(eta);
  CHECK(bound > 0.992);
  CHECK(bound < 0.996);
}

TEST_CASE("calibration csv covers the fitted branch") {
  std::ostringstream os;
  write_calibration_csv(PumpCalibration{}, 150, os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "p_watts,eta");
  int rows = 0;
  double p = 0.0, eta = 0.0;
  char comma;
  while (is >> p >> comma >> eta) ++rows;
  CHECK(rows == 150);
  CHECK(p == doctest::Approx(149.0));
  CHECK(eta == doctest::Approx(1.0));
}

TEST_CASE("model validation") {
  CHECK_THROWS_AS((ConverterModel{1.5, 110e9, ProfileKind::Sinc2, 0.0}.validate()),
                  std::invalid_argument);
  CHECK_THROWS_AS((ConverterModel{0.5, 0.0, ProfileKind::Sinc2, 0.0}.validate()),
                  std::invalid_argument);
  CHECK_NOTHROW((ConverterModel{0.5, 0.0, ProfileKind::Flat, 0.0}.validate()));
  CHECK_THROWS_AS((PumpCalibration{0.0, 1.0}.validate()), std::invalid_argument);
}
