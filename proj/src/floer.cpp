#include "tentacle/floer.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>
#include <vector>

#include "tentacle/log.hpp"

namespace tentacle {

LoopState::LoopState(int N_in, double eta_in, Mat v_in)
    : N(N_in), eta(eta_in), v(std::move(v_in)) {
  if (N < 16 || (N & (N - 1)) != 0) {
    throw ValidationError("LoopState: N must be a power of two >= 16");
  }
  if (v.rows() != N) {
    throw ValidationError("LoopState: v must have one row per sample");
  }
  if (v.cols() < 2 || v.cols() % 2 != 0) {
    throw ValidationError("LoopState: phase dimension must be even and >= 2");
  }
  if (!v.allFinite() || !std::isfinite(eta)) {
    throw ValidationError("LoopState: non-finite entries");
  }
}

double discrete_action(const LoopState& u, const QuadraticHamiltonian& H) {
  if (u.dim() != H.dim()) {
    throw ValidationError("discrete_action: dimension mismatch");
  }
  const int N = u.N;
  const Mat J = standard_j0(u.dim() / 2);
  double kin = 0.0, pot = 0.0;
  for (int j = 0; j < N; ++j) {
    const int jn = (j + 1) % N;
    // omega0(v_j/2, v_{j+1} - v_j) = omega0(v_j, v_{j+1})/2
    kin += 0.5 * (J * u.v.row(j).transpose()).dot(u.v.row(jn));
    pot += H.value(u.v.row(j).transpose());
  }
  return kin - u.eta * pot / N;
}

std::pair<Mat, double> discrete_gradient(const LoopState& u,
                                         const QuadraticHamiltonian& H) {
  if (u.dim() != H.dim()) {
    throw ValidationError("discrete_gradient: dimension mismatch");
  }
  const int N = u.N;
  const Mat J = standard_j0(u.dim() / 2);
  Mat dv(N, u.dim());
  double pot = 0.0;
  for (int j = 0; j < N; ++j) {
    const int jn = (j + 1) % N, jp = (j + N - 1) % N;
    const Vec chord =
        (u.v.row(jn) - u.v.row(jp)).transpose() * (0.5 * N);
    const Vec xh = J * (H.A * u.v.row(j).transpose());  // X_H(v_j)
    dv.row(j) = (-J * (chord - u.eta * xh)).transpose();
    pot += H.value(u.v.row(j).transpose());
  }
  return {dv, -pot / N};
}

double gradient_norm(const Mat& dv, double deta) {
  const double N = static_cast<double>(dv.rows());
  return std::sqrt(dv.squaredNorm() / N + deta * deta);
}

Mat discrete_hessian_matrix(const LoopState& u, const QuadraticHamiltonian& H) {
  if (u.dim() != H.dim()) {
    throw ValidationError("discrete_hessian_matrix: dimension mismatch");
  }
  const int N = u.N, d = u.dim();
  if (N * d > 8192) {
    throw ValidationError(
        "discrete_hessian_matrix: N * dim > 8192, dense assembly refused");
  }
  const Mat J = standard_j0(d / 2);
  const int size = N * d + 1;
  Mat Hs = Mat::Zero(size, size);
  const Mat half_j = 0.5 * J;
  for (int j = 0; j < N; ++j) {
    const int jn = (j + 1) % N;
    // d^2/dv_j dv_{j+1} of the chord term, plus transpose for the wrap.
    Hs.block(j * d, jn * d, d, d) -= half_j;
    Hs.block(jn * d, j * d, d, d) += half_j;
    Hs.block(j * d, j * d, d, d) -= (u.eta / N) * H.A;
    const Vec col = (H.A * u.v.row(j).transpose()) / N;
    Hs.block(j * d, size - 1, d, 1) -= col;
    Hs.block(size - 1, j * d, 1, d) -= col.transpose();
  }
  return Hs;
}

Vec discrete_hessian_spectrum(const LoopState& u, const QuadraticHamiltonian& H,
                              int n_low) {
  const int N = u.N, d = u.dim();
  const int size = N * d + 1;
  if (n_low < 1 || n_low > size) {
    throw ValidationError("discrete_hessian_spectrum: bad n_low");
  }
  // Conjugate the Euclidean bilinear form into the loop metric
  // G = diag(I/N, 1): eigenvalues of G^{-1/2} Hess G^{-1/2}.
  Mat Hs = discrete_hessian_matrix(u, H);
  const double rootN = std::sqrt(static_cast<double>(N));
  Hs.topLeftCorner(size - 1, size - 1) *= static_cast<double>(N);
  Hs.topRightCorner(size - 1, 1) *= rootN;
  Hs.bottomLeftCorner(1, size - 1) *= rootN;
  Eigen::SelfAdjointEigenSolver<Mat> es(Hs, Eigen::EigenvaluesOnly);
  Vec ev = es.eigenvalues();
  std::vector<int> idx(size);
  for (int i = 0; i < size; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    return std::abs(ev(a)) < std::abs(ev(b));
  });
  Vec out(n_low);
  for (int i = 0; i < n_low; ++i) out(i) = ev(idx[i]);
  return out;
}

namespace {

struct FlowState {
  Mat v;
  double eta = 0.0;
};

FlowState axpy(const FlowState& u, double a, const FlowState& g) {
  return {u.v + a * g.v, u.eta + a * g.eta};
}

double state_norm(const FlowState& u) {
  const double N = static_cast<double>(u.v.rows());
  return std::sqrt(u.v.squaredNorm() / N + u.eta * u.eta);
}

}  // namespace

FlowDiagnostics integrate_flow(const LoopState& u0,
                               const QuadraticHamiltonian& H, double s_max,
                               double ds, int snap_every) {
  if (!(s_max > 0.0) || !(ds > 0.0)) {
    throw ValidationError("integrate_flow: s_max and ds must be positive");
  }
  if (snap_every < 1) {
    throw ValidationError("integrate_flow: snap_every must be >= 1");
  }
  const double cfl = 0.5 / ((1.0 + opnorm_sym(H.A)) * u0.N);
  if (ds > cfl * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "integrate_flow: ds = " << ds << " exceeds the stability bound "
       << cfl;
    throw ValidationError(os.str());
  }

  const auto grad = [&](const FlowState& u) -> FlowState {
    const LoopState state(u0.N, u.eta, u.v);
    auto [dv, deta] = discrete_gradient(state, H);
    return {std::move(dv), deta};
  };

  FlowDiagnostics diag;
  FlowState u{u0.v, u0.eta};
  double s = 0.0;
  double prev_gnorm = 0.0, h_prev = 0.0;
  int step = 0;

  const auto record = [&](double gnorm) {
    diag.s_grid.push_back(s);
    diag.action_series.push_back(
        discrete_action(LoopState(u0.N, u.eta, u.v), H));
    diag.grad_norm_series.push_back(gnorm);
  };

  while (true) {
    const FlowState g = grad(u);
    const double gnorm = gradient_norm(g.v, g.eta);
    if (step > 0) {
      // Trapezoid of |grad|^2 across the step just completed.
      diag.energy += 0.5 * h_prev * (prev_gnorm * prev_gnorm + gnorm * gnorm);
    }

    const bool done = gnorm < 1e-8 || state_norm(u) > 1e6 ||
                      s >= s_max * (1.0 - 1e-12);
    if (step % snap_every == 0 || done) record(gnorm);
    if (done) {
      diag.converged = gnorm < 1e-8;
      diag.escaped = !diag.converged && state_norm(u) > 1e6;
      break;
    }

    const double h = std::min(ds, s_max - s);
    const FlowState k1 = g;
    const FlowState k2 = grad(axpy(u, 0.5 * h, k1));
    const FlowState k3 = grad(axpy(u, 0.5 * h, k2));
    const FlowState k4 = grad(axpy(u, h, k3));
    u.v += (h / 6.0) * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
    u.eta += (h / 6.0) * (k1.eta + 2.0 * k2.eta + 2.0 * k3.eta + k4.eta);
    s += h;
    ++step;
    h_prev = h;
    prev_gnorm = gnorm;
  }

  diag.limit = LoopState(u0.N, u.eta, u.v);
  return diag;
}

std::vector<FlowDiagnostics> integrate_flow_batch(
    const std::vector<LoopState>& initial, const QuadraticHamiltonian& H,
    double s_max, double ds, int snap_every, int jobs) {
  if (jobs < 1) throw ValidationError("integrate_flow_batch: jobs must be >= 1");
  std::vector<FlowDiagnostics> results(initial.size());
  if (jobs == 1 || initial.size() <= 1) {
    for (std::size_t i = 0; i < initial.size(); ++i) {
      results[i] = integrate_flow(initial[i], H, s_max, ds, snap_every);
    }
    return results;
  }
  const int workers =
      std::min<int>(jobs, static_cast<int>(initial.size()));
  std::vector<std::future<void>> futures;
  for (int w = 0; w < workers; ++w) {
    futures.push_back(std::async(std::launch::async, [&, w]() {
      for (std::size_t i = w; i < initial.size(); i += workers) {
        results[i] = integrate_flow(initial[i], H, s_max, ds, snap_every);
      }
    }));
  }
  for (auto& f : futures) f.get();
  return results;
}

NewtonResult newton_refine(const LoopState& u0, const QuadraticHamiltonian& H,
                           int max_iter, double res_tol) {
  const int N = u0.N, d = u0.dim();
  if (d != H.dim()) {
    throw ValidationError("newton_refine: dimension mismatch");
  }
  {
    auto [dv, deta] = discrete_gradient(u0, H);
    const double g = gradient_norm(dv, deta);
    if (g >= 0.1) {
      std::ostringstream os;
      os << "newton_refine: gradient norm " << g
         << " outside the basin heuristic (< 0.1)";
      throw ValidationError(os.str());
    }
  }

  const Mat J = standard_j0(d / 2);
  const Mat JA = J * H.A;
  const int size = N * d + 1;

  Mat v = u0.v;
  double eta = u0.eta;

  const auto residual = [&](const Mat& vv, double ee) -> Vec {
    Vec r = Vec::Zero(size);
    double pot = 0.0;
    for (int j = 0; j < N; ++j) {
      const int jn = (j + 1) % N, jp = (j + N - 1) % N;
      const Vec rj = (vv.row(jn) - vv.row(jp)).transpose() * (0.5 * N) -
                     ee * (JA * vv.row(j).transpose());
      r.segment(j * d, d) = rj;
      pot += H.value(vv.row(j).transpose());
    }
    r(size - 1) = pot / N;
    return r;
  };

  NewtonResult result;
  Vec r = residual(v, eta);
  result.residual_norm = r.norm();

  for (int it = 0; it < max_iter; ++it) {
    if (result.residual_norm < res_tol) {
      result.converged = true;
      break;
    }
    Mat Jac = Mat::Zero(size, size);
    for (int j = 0; j < N; ++j) {
      const int jn = (j + 1) % N, jp = (j + N - 1) % N;
      Jac.block(j * d, jn * d, d, d) +=
          0.5 * N * Mat::Identity(d, d);
      Jac.block(j * d, jp * d, d, d) -=
          0.5 * N * Mat::Identity(d, d);
      Jac.block(j * d, j * d, d, d) -= eta * JA;
      Jac.block(j * d, size - 1, d, 1) = -(JA * v.row(j).transpose());
      Jac.block(size - 1, j * d, 1, d) =
          (H.A * v.row(j).transpose()).transpose() / N;
    }
    Eigen::BDCSVD<Mat> svd(Jac, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vec sv = svd.singularValues();
    const double cutoff = 1e-10 * sv(0);
    // Minimum-norm step: directions along the reparametrization circle have
    // singular values at the numerical floor and are dropped.
    Vec coeff = svd.matrixU().transpose() * r;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      coeff(i) = sv(i) > cutoff ? coeff(i) / sv(i) : 0.0;
    }
    const Vec step = svd.matrixV() * coeff;

    for (int j = 0; j < N; ++j) {
      v.row(j) -= step.segment(j * d, d).transpose();
    }
    eta -= step(size - 1);
    r = residual(v, eta);
    result.residual_norm = r.norm();
    result.iterations = it + 1;
  }
  if (!result.converged && result.residual_norm < res_tol) {
    result.converged = true;
  }
  if (!result.converged) {
    std::ostringstream os;
    os << "newton_refine: no convergence after " << result.iterations
       << " iterations; last residual " << result.residual_norm;
    throw UnresolvedError(os.str());
  }
  result.refined = LoopState(N, eta, v);
  return result;
}

}  // namespace tentacle
