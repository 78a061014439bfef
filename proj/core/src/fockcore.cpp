#include "chromahom/fockcore.hpp"

#include <cmath>
#include <stdexcept>

namespace chromahom::fockcore {

namespace {

constexpr int kMaxSupportedPhotons = 32;

double binomial(int n, int k) {
  double v = 1.0;
  for (int i = 1; i <= k; ++i) v *= static_cast<double>(n - k + i) / i;
  return v;
}

double sqrt_factorial(int n) {
  double v = 1.0;
  for (int i = 2; i <= n; ++i) v *= std::sqrt(static_cast<double>(i));
  return v;
}

Complex ipow(Complex base, int exp) {
  Complex v{1.0, 0.0};
  for (int i = 0; i < exp; ++i) v *= base;
  return v;
}

}  // namespace

double BeamSplitterMatrix::interaction_angle() const { return std::atan2(r_, t_); }

ModeMatrix BeamSplitterMatrix::matrix() const {
  const Complex ir{0.0, r_};
  return {{{Complex{t_, 0.0}, ir}, {ir, Complex{t_, 0.0}}}};
}

ModeMatrix BeamSplitterMatrix::inverse_matrix() const {
  const Complex mir{0.0, -r_};
  return {{{Complex{t_, 0.0}, mir}, {mir, Complex{t_, 0.0}}}};
}

BeamSplitterMatrix make_beam_splitter(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw std::domain_error("make_beam_splitter: transition probability must be in [0, 1]");
  }
  return BeamSplitterMatrix(std::sqrt(1.0 - eta), std::sqrt(eta));
}

TwoModeFockState::TwoModeFockState(int n_max) : n_max_(n_max) {
  if (n_max < 1 || n_max > kMaxSupportedPhotons) {
    throw std::invalid_argument("TwoModeFockState: n_max must be in [1, 32]");
  }
  amps_.assign(static_cast<std::size_t>((n_max + 1) * (n_max + 2) / 2), Complex{0.0, 0.0});
}

TwoModeFockState TwoModeFockState::fock(int n1, int n2, int n_max) {
  TwoModeFockState s(n_max);
  s.check_pair(n1, n2);
  s.amps_[static_cast<std::size_t>(s.index(n1, n2))] = Complex{1.0, 0.0};
  return s;
}

int TwoModeFockState::index(int n1, int n2) const {
  const int n = n1 + n2;
  return n * (n + 1) / 2 + n2;
}

void TwoModeFockState::check_pair(int n1, int n2) const {
  if (n1 < 0 || n2 < 0 || n1 + n2 > n_max_) {
    throw std::invalid_argument("TwoModeFockState: photon-number pair out of range");
  }
}

Complex TwoModeFockState::amplitude(int n1, int n2) const {
  check_pair(n1, n2);
  return amps_[static_cast<std::size_t>(index(n1, n2))];
}

void TwoModeFockState::set_amplitude(int n1, int n2, Complex value) {
  check_pair(n1, n2);
  amps_[static_cast<std::size_t>(index(n1, n2))] = value;
}

double TwoModeFockState::norm() const {
  double s = 0.0;
  for (const Complex& a : amps_) s += std::norm(a);
  return std::sqrt(s);
}

void TwoModeFockState::normalize() {
  const double n = norm();
  if (n <= 0.0) throw std::domain_error("TwoModeFockState: cannot normalize the zero state");
  for (Complex& a : amps_) a /= n;
}

double TwoModeFockState::total_photon_expectation() const {
  double s = 0.0;
  for (int n1 = 0; n1 <= n_max_; ++n1) {
    for (int n2 = 0; n1 + n2 <= n_max_; ++n2) {
      s += (n1 + n2) * std::norm(amps_[static_cast<std::size_t>(index(n1, n2))]);
    }
  }
  return s;
}

TwoModeFockState apply_mode_matrix(const TwoModeFockState& state, const ModeMatrix& m) {
  const int n_max = state.n_max();
  TwoModeFockState out(n_max);

  // |n1, n2> = (a1^dag)^n1 (a2^dag)^n2 |0> / sqrt(n1! n2!). Substituting the
  // output operators and expanding both powers binomially scatters each basis
  // amplitude over all (m1, m2) with m1 + m2 = n1 + n2.
  for (int n1 = 0; n1 <= n_max; ++n1) {
    for (int n2 = 0; n1 + n2 <= n_max; ++n2) {
      const Complex c = state.amps_[static_cast<std::size_t>(state.index(n1, n2))];
      if (c == Complex{0.0, 0.0}) continue;
      const double in_norm = sqrt_factorial(n1) * sqrt_factorial(n2);
      for (int j = 0; j <= n1; ++j) {
        const Complex f1 =
            binomial(n1, j) * ipow(m[0][0], j) * ipow(m[0][1], n1 - j);
        for (int k = 0; k <= n2; ++k) {
          const Complex f2 =
              binomial(n2, k) * ipow(m[1][0], k) * ipow(m[1][1], n2 - k);
          const int m1 = j + k;
          const int m2 = n1 + n2 - m1;
          const double out_norm = sqrt_factorial(m1) * sqrt_factorial(m2);
          out.amps_[static_cast<std::size_t>(out.index(m1, m2))] +=
              c * f1 * f2 * (out_norm / in_norm);
        }
      }
    }
  }
  return out;
}

TwoModeFockState apply_beam_splitter(const TwoModeFockState& state, const BeamSplitterMatrix& bs) {
  return apply_mode_matrix(state, bs.matrix());
}

double coincidence_probability(const TwoModeFockState& state) {
  if (state.n_max() < 2) return 0.0;
  return std::norm(state.amplitude(1, 1));
}

double max_visibility_bound(double eta) {
  if (!(eta > 0.0 && eta < 1.0)) {
    throw std::domain_error("max_visibility_bound: eta must be strictly inside (0, 1)");
  }
  const double t2 = 1.0 - eta;
  const double r2 = eta;
  return 2.0 * t2 * r2 / (t2 * t2 + r2 * r2);
}

}  // namespace chromahom::fockcore
