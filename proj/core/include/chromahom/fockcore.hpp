#pragma once

#include <array>
#include <complex>
#include <vector>

// Exact two-mode Fock-space algebra for a lossless mode-coupling element.
// The same 2x2 unitary describes a spatial beam splitter and a pumped
// frequency converter swapping two color modes; only the labeling of the
// modes differs.

namespace chromahom::fockcore {

using Complex = std::complex<double>;

// Row-major 2x2 complex matrix acting on creation operators:
// a_j^dag -> sum_k M[j][k] b_k^dag.
using ModeMatrix = std::array<std::array<Complex, 2>, 2>;

// Lossless two-mode coupling with real t, r >= 0, t^2 + r^2 = 1 and the
// fixed phase convention [[t, i r], [i r, t]] (off-diagonal phase +pi/2).
// Observable probabilities do not depend on the sign of that phase.
class BeamSplitterMatrix {
 public:
  double transmittance() const { return t_; }
  double reflectance() const { return r_; }

  // Interaction angle theta with t = cos(theta), r = sin(theta).
  double interaction_angle() const;

  ModeMatrix matrix() const;

  // The inverse coupling; equals the elementwise conjugate of matrix().
  ModeMatrix inverse_matrix() const;

 private:
  friend BeamSplitterMatrix make_beam_splitter(double eta);
  BeamSplitterMatrix(double t, double r) : t_(t), r_(r) {}

  double t_;
  double r_;
};

// Builds the coupling for a given transition (swap) probability eta = r^2.
// Throws std::domain_error for eta outside [0, 1].
BeamSplitterMatrix make_beam_splitter(double eta);

// Pure state of two bosonic modes with total photon number n1 + n2 <= n_max,
// stored as a dense complex amplitude array. Immutable in normal use: the
// operations below return new states.
class TwoModeFockState {
 public:
  explicit TwoModeFockState(int n_max = 4);

  // Basis state |n1, n2>.
  static TwoModeFockState fock(int n1, int n2, int n_max = 4);

  int n_max() const { return n_max_; }

  Complex amplitude(int n1, int n2) const;
  void set_amplitude(int n1, int n2, Complex value);

  double norm() const;
  void normalize();

  // <n1 + n2>, conserved by any ModeMatrix application that is unitary.
  double total_photon_expectation() const;

 private:
  friend TwoModeFockState apply_mode_matrix(const TwoModeFockState&, const ModeMatrix&);

  int index(int n1, int n2) const;
  void check_pair(int n1, int n2) const;

  int n_max_;
  std::vector<Complex> amps_;
};

// Applies the creation-operator substitution a_j^dag -> sum_k M[j][k] b_k^dag
// by exact multinomial expansion. No truncation: total photon number is
// conserved, so the result lives in the same n_max space.
TwoModeFockState apply_mode_matrix(const TwoModeFockState& state, const ModeMatrix& m);

TwoModeFockState apply_beam_splitter(const TwoModeFockState& state, const BeamSplitterMatrix& bs);

// |<1,1|state>|^2.
double coincidence_probability(const TwoModeFockState& state);

// Upper bound on the two-photon interference dip visibility for an unbalanced
// coupling: V = 2 t^2 r^2 / (t^4 + r^4), i.e. dip floor (t^2 - r^2)^2 against
// the incoherent baseline t^4 + r^4. Throws std::domain_error for eta in
// {0, 1} where no interference baseline exists.
double max_visibility_bound(double eta);

}  // namespace chromahom::fockcore
