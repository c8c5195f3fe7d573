#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tentacle {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Phase-space point, coordinates ordered (q_1..q_n, p_1..p_n).
using PhasePoint = Eigen::VectorXd;

/// Input fails validation: malformed file, asymmetric matrix, bad dimension.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The method declines to certify a result (degenerate crossing, resonant
/// spectrum, missing normal-form transform). The input itself is well formed.
class UnresolvedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace tol {
inline constexpr double symmetry = 1e-12;       // A vs A^T, relative to max entry
inline constexpr double liouville = 1e-10;      // J0 L + L^T J0 vs J0, entrywise
inline constexpr double symplectic = 1e-9;      // S^T J0 S vs J0, entrywise
inline constexpr double nondegeneracy = 1e-9;   // sigma_min(A) vs sigma_max(A)
inline constexpr double eig_group_rel = 1e-7;   // eigenvalue clustering, x (1+|A|)
inline constexpr double eig_near_warn = 1e-5;   // near-degenerate family warning
inline constexpr double axis_rel = 1e-8;        // |Re| or |Im| below this x |A| snaps to axis
inline constexpr double transform_residual = 1e-7;
}  // namespace tol

/// H(x) = 1/2 <x, A x> - c on R^{2n}, A symmetric. The constructor
/// symmetrizes A and rejects input whose asymmetry exceeds tol::symmetry
/// relative to the largest entry.
struct QuadraticHamiltonian {
  Mat A;
  double c = 0.0;

  QuadraticHamiltonian() = default;
  QuadraticHamiltonian(const Mat& A_in, double c_in);

  int dim() const { return static_cast<int>(A.rows()); }
  double value(const PhasePoint& x) const;
  Vec gradient(const PhasePoint& x) const;
};

/// Linear vector field x -> L x.
struct LinearField {
  Mat L;
  int dim() const { return static_cast<int>(L.rows()); }
};

/// Half-integers stored exactly as twice their value.
struct HalfInt {
  int twice = 0;

  static HalfInt from_twice(int t) { return HalfInt{t}; }
  static HalfInt whole(int k) { return HalfInt{2 * k}; }
  double value() const { return 0.5 * twice; }

  friend HalfInt operator+(HalfInt a, HalfInt b) { return HalfInt{a.twice + b.twice}; }
  friend HalfInt operator-(HalfInt a, HalfInt b) { return HalfInt{a.twice - b.twice}; }
  friend bool operator==(HalfInt a, HalfInt b) { return a.twice == b.twice; }
  friend bool operator!=(HalfInt a, HalfInt b) { return a.twice != b.twice; }
};

/// Standard symplectic structure J0 = [[0, I], [-I, 0]] on R^{2n}.
Mat standard_j0(int n);

/// omega_0(u, v) = <J0 u, v>.
double omega0(const Vec& u, const Vec& v);

/// Linearization of the Hamiltonian vector field: X_H(x) = J0 A x.
Mat hamiltonian_matrix(const QuadraticHamiltonian& H);

/// Poisson bracket of two quadratic Hamiltonians, returned as the quadratic
/// function {G,F}(x) = dF(X_G)(x), i.e. the derivative of F along the flow
/// of G. The result's matrix is B_F J0 B_G + (B_F J0 B_G)^T so that
/// 1/2 <x, A_out x> reproduces the bracket value exactly; the constant is 0.
QuadraticHamiltonian poisson_bracket(const QuadraticHamiltonian& F,
                                     const QuadraticHamiltonian& G);

/// Whether x -> L x satisfies the Liouville criterion J0 L + L^T J0 = J0
/// entrywise within tol::liouville.
bool is_liouville(const LinearField& X, double tolerance = tol::liouville);

/// Convex blend (1-eps) X + eps Y of two Liouville fields, eps in [0, 1].
/// The affine structure of the criterion keeps the blend Liouville.
LinearField blend_liouville(const LinearField& X, const LinearField& Y, double eps);

/// The field sum_i (p_i/2 + a q_i) d/dp_i + (q_i/2 + a p_i) d/dq_i on R^{2m}:
/// the radial field plus an off-diagonal coupling of strength alpha. Liouville
/// for every alpha.
LinearField x_alpha_field(int m, double alpha);

/// Random symplectic matrix exp(scale K), K a seeded Gaussian draw from the
/// symplectic Lie algebra (K = J0 S with S symmetric).
Mat random_symplectic(int n, std::uint64_t seed, double scale = 0.3);

// Shared numerics helpers.

/// (M + M^T)/2.
Mat sym(const Mat& M);

/// Spectral norm of a symmetric matrix (max |eigenvalue|).
double opnorm_sym(const Mat& A);

/// Matrix exponential (scaling and squaring with Pade approximants).
Mat expm(const Mat& M);

/// Reject degenerate A: requires sigma_min > tol::nondegeneracy * sigma_max.
void require_nondegenerate(const Mat& A, const std::string& context);

}  // namespace tentacle
