#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tentacle/core.hpp"

namespace tentacle {

/// Discretized loop with the period multiplier: N uniform nodes v_j in
/// R^{2n} (rows of v) plus eta. N must be a power of two >= 16.
struct LoopState {
  int N = 0;
  double eta = 0.0;
  Mat v;  // N x 2n, row j = v(j/N)

  LoopState() = default;
  LoopState(int N_in, double eta_in, Mat v_in);
  int dim() const { return static_cast<int>(v.cols()); }
};

struct FlowDiagnostics {
  std::vector<double> s_grid;
  std::vector<double> action_series;
  std::vector<double> grad_norm_series;
  double energy = 0.0;  // accumulated integral of |grad|^2
  bool converged = false;
  bool escaped = false;
  std::optional<LoopState> limit;
};

/// Discretized action: sum_j omega0(v_j/2, v_{j+1} - v_j) (periodic chords)
/// minus eta times the nodal average of H.
double discrete_action(const LoopState& u, const QuadraticHamiltonian& H);

/// Gradient of the discrete action in the discrete loop metric
/// ((1/N) sum <.,.>) x R:
///   dv_j = -J0 [ (v_{j+1} - v_{j-1}) N/2 - eta J0 A v_j ],
///   deta = -(1/N) sum_j H(v_j).
/// This is the exact metric gradient of discrete_action, not an independent
/// discretization; the consistency tests rely on that.
std::pair<Mat, double> discrete_gradient(const LoopState& u,
                                         const QuadraticHamiltonian& H);

/// Norm of the gradient pair in the discrete metric.
double gradient_norm(const Mat& dv, double deta);

/// Dense symmetric (2nN+1) x (2nN+1) bilinear-form matrix of the second
/// derivative of the discrete action (Euclidean pairing; variable order
/// v_0, .., v_{N-1}, eta). Guarded against N 2n > 8192.
Mat discrete_hessian_matrix(const LoopState& u, const QuadraticHamiltonian& H);

/// n_low eigenvalues of smallest magnitude of the Hessian in the discrete
/// metric (i.e. of G^{-1/2} Hess G^{-1/2} with G = diag(I/N, 1)), sorted by
/// magnitude. The kernel dimension is what the near-zero count estimates.
Vec discrete_hessian_spectrum(const LoopState& u, const QuadraticHamiltonian& H,
                              int n_low);

/// Ascending gradient flow u' = +grad A(u) by RK4. ds must respect the
/// stability bound 0.5 / ((1 + |A|) N). Stops early at gradient norm 1e-8
/// (converged) or |u| > 1e6 (escaped).
FlowDiagnostics integrate_flow(const LoopState& u0,
                               const QuadraticHamiltonian& H, double s_max,
                               double ds, int snap_every = 10);

/// Batch variant fanning the runs across `jobs` workers; output order equals
/// input order regardless of scheduling.
std::vector<FlowDiagnostics> integrate_flow_batch(
    const std::vector<LoopState>& initial, const QuadraticHamiltonian& H,
    double s_max, double ds, int snap_every = 10, int jobs = 1);

struct NewtonResult {
  LoopState refined;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Gauss-Newton refinement of the discrete critical-point equations
///   (v_{j+1} - v_{j-1}) N/2 - eta J0 A v_j = 0,  (1/N) sum H(v_j) = 0,
/// with minimum-norm steps (SVD pseudo-inverse) to absorb the reparametrization
/// degeneracy. Requires a starting point inside the basin (gradient norm < 0.1).
NewtonResult newton_refine(const LoopState& u0, const QuadraticHamiltonian& H,
                           int max_iter = 50, double res_tol = 1e-10);

}  // namespace tentacle
