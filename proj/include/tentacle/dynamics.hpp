#pragma once

#include <optional>
#include <vector>

#include "tentacle/core.hpp"
#include "tentacle/hormander.hpp"

namespace tentacle {

/// Closed characteristic on the energy surface H = 0: the k-fold cover of the
/// circle carried by an elliptic eigenplane. v(t) = exp(eta t J0 A) x0 on
/// t in [0,1], eta = 2 pi k / mu.
struct ClosedCharacteristic {
  Mat plane;   // 2n x 2, orthonormal basis of the invariant plane
  double mu = 0.0;
  int k = 0;
  double eta = 0.0;
  Vec x0;
  double action = 0.0;
  std::optional<HalfInt> cz_transverse;  // unresolved when absent
};

/// Path in the linear symplectic group on t in [0,1], Psi(0) = I, given by
/// uniform samples. When the path is exp(t B) for a constant generator B the
/// generator should be supplied: crossings are then located by dense
/// evaluation and bisection, and crossing forms are exact.
struct SymplecticPath {
  std::vector<Mat> samples;  // Psi(t_j), t_j = j/(S-1), S >= 2
  std::optional<Mat> generator;

  static SymplecticPath from_generator(const Mat& B, int sample_count = 256);
  int dim() const { return samples.empty() ? 0 : static_cast<int>(samples.front().rows()); }
};

struct FlowResult {
  Mat Phi;  // exp(t J0 A)
};

/// exp(t J0 A).
Mat flow(const QuadraticHamiltonian& H, double t);

/// Enumerate closed characteristics up to cover k_max: for each elliptic
/// family +-i mu whose invariant plane meets {<x,Ax> = 2c}, covers
/// k = 1, -1, 2, -2, ... Requires c > 0 and pairwise distinct elliptic
/// frequencies (resonant spectra are refused).
std::vector<ClosedCharacteristic> enumerate_closed_characteristics(
    const QuadraticHamiltonian& H, int k_max);

/// Action integral of the orbit: trapezoid quadrature of lambda0(d_t v) over
/// N_quad nodes minus eta times the H average (the closed form is eta c).
/// Nodal derivatives are exact (d_t v = eta J0 A v).
double orbit_action(const ClosedCharacteristic& orbit,
                    const QuadraticHamiltonian& H, int n_quad = 512);

/// Robbin-Salamon index of a symplectic path: crossings of det(Psi(t) - I)
/// with half-weighted endpoints, signature of the crossing form on the
/// kernel. Returns nullopt (never a wrong number) when a crossing is too
/// degenerate to resolve or the path hugs the identity.
std::optional<HalfInt> rs_index(const SymplecticPath& path);

/// Conley-Zehnder index of the orbit's linearized return path restricted to
/// the symplectic complement of its plane. Needs dim >= 4 and a semisimple
/// classification; otherwise unresolved.
std::optional<HalfInt> transverse_cz(const ClosedCharacteristic& orbit,
                                     const QuadraticHamiltonian& H);

/// mu_sigma = ((d - i) - i)/2 for a Morse critical manifold of dimension-d
/// normal space and Morse index i.
HalfInt signature_index(int normal_dim, int morse_index);

/// Grading mu = mu_sigma + mu_cz + 1/2.
HalfInt grading(HalfInt mu_sigma, HalfInt mu_cz);

/// Expected dimension mu_cz_plus - mu_cz_minus + (dim_minus + dim_plus)/2 of
/// a connecting-trajectory space between critical manifolds.
double moduli_dimension(HalfInt cz_minus, HalfInt cz_plus, int dim_minus,
                        int dim_plus);

struct LengthActionCheck {
  double length = 0.0;
  double action = 0.0;
  double ratio = 0.0;
};

/// Loop length (trapezoid of |d_t v|) against |action|; the ratio is the
/// quantity bounded uniformly on tentacular energy surfaces. Zero action is
/// an error.
LengthActionCheck length_action_check(const ClosedCharacteristic& orbit,
                                      const QuadraticHamiltonian& H,
                                      int n_quad = 512);

}  // namespace tentacle
