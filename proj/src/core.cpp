#include "tentacle/core.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <random>
#include <sstream>

namespace tentacle {

namespace {

void require_even_dim(Eigen::Index d, const std::string& context) {
  if (d < 2 || d % 2 != 0) {
    std::ostringstream msg;
    msg << context << ": phase-space dimension must be even and >= 2, got " << d;
    throw ValidationError(msg.str());
  }
}

}  // namespace

QuadraticHamiltonian::QuadraticHamiltonian(const Mat& A_in, double c_in) : c(c_in) {
  require_even_dim(A_in.rows(), "QuadraticHamiltonian");
  if (A_in.rows() != A_in.cols()) {
    throw ValidationError("QuadraticHamiltonian: A must be square");
  }
  const double scale = std::max(1.0, A_in.cwiseAbs().maxCoeff());
  Mat skew = A_in - A_in.transpose();
  if (skew.cwiseAbs().maxCoeff() > tol::symmetry * scale) {
    // Point at the worst offender; the CLI surfaces this message verbatim.
    Eigen::Index i = 0, j = 0;
    skew.cwiseAbs().maxCoeff(&i, &j);
    std::ostringstream msg;
    msg << "QuadraticHamiltonian: A is not symmetric, entries (" << i << "," << j
        << ") and (" << j << "," << i << ") differ by " << skew.cwiseAbs().maxCoeff();
    throw ValidationError(msg.str());
  }
  A = 0.5 * (A_in + A_in.transpose());
}

double QuadraticHamiltonian::value(const PhasePoint& x) const {
  if (x.size() != A.rows()) throw ValidationError("value: dimension mismatch");
  return 0.5 * x.dot(A * x) - c;
}

Vec QuadraticHamiltonian::gradient(const PhasePoint& x) const {
  if (x.size() != A.rows()) throw ValidationError("gradient: dimension mismatch");
  return A * x;
}

Mat standard_j0(int n) {
  if (n < 1) throw ValidationError("standard_j0: n must be >= 1");
  Mat J = Mat::Zero(2 * n, 2 * n);
  J.topRightCorner(n, n) = Mat::Identity(n, n);
  J.bottomLeftCorner(n, n) = -Mat::Identity(n, n);
  return J;
}

double omega0(const Vec& u, const Vec& v) {
  require_even_dim(u.size(), "omega0");
  if (u.size() != v.size()) throw ValidationError("omega0: dimension mismatch");
  const Eigen::Index n = u.size() / 2;
  // <J0 u, v> = <u_p, v_q> - <u_q, v_p>.
  return u.tail(n).dot(v.head(n)) - u.head(n).dot(v.tail(n));
}

Mat hamiltonian_matrix(const QuadraticHamiltonian& H) {
  return standard_j0(H.dim() / 2) * H.A;
}

QuadraticHamiltonian poisson_bracket(const QuadraticHamiltonian& F,
                                     const QuadraticHamiltonian& G) {
  if (F.dim() != G.dim()) {
    throw ValidationError("poisson_bracket: operands live on different spaces");
  }
  const Mat J = standard_j0(F.dim() / 2);
  const Mat P = F.A * J * G.A;
  return QuadraticHamiltonian(P + P.transpose(), 0.0);
}

bool is_liouville(const LinearField& X, double tolerance) {
  require_even_dim(X.L.rows(), "is_liouville");
  const Mat J = standard_j0(static_cast<int>(X.L.rows()) / 2);
  const Mat defect = J * X.L + X.L.transpose() * J - J;
  return defect.cwiseAbs().maxCoeff() <= tolerance;
}

LinearField blend_liouville(const LinearField& X, const LinearField& Y, double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) {
    throw ValidationError("blend_liouville: eps must lie in [0, 1]");
  }
  if (X.L.rows() != Y.L.rows()) {
    throw ValidationError("blend_liouville: dimension mismatch");
  }
  if (!is_liouville(X) || !is_liouville(Y)) {
    throw ValidationError("blend_liouville: operand is not a Liouville field");
  }
  return LinearField{(1.0 - eps) * X.L + eps * Y.L};
}

LinearField x_alpha_field(int m, double alpha) {
  if (m < 1) throw ValidationError("x_alpha_field: m must be >= 1");
  Mat L = 0.5 * Mat::Identity(2 * m, 2 * m);
  L.topRightCorner(m, m) += alpha * Mat::Identity(m, m);
  L.bottomLeftCorner(m, m) += alpha * Mat::Identity(m, m);
  return LinearField{L};
}

Mat random_symplectic(int n, std::uint64_t seed, double scale) {
  if (n < 1) throw ValidationError("random_symplectic: n must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat S(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < S.rows(); ++i) {
    for (Eigen::Index j = i; j < S.cols(); ++j) {
      const double g = gauss(rng);
      S(i, j) = g;
      S(j, i) = g;
    }
  }
  // J0 S is in the symplectic Lie algebra for every symmetric S.
  const Mat K = standard_j0(n) * S;
  return expm(scale * K);
}

Mat sym(const Mat& M) { return 0.5 * (M + M.transpose()); }

double opnorm_sym(const Mat& A) {
  Eigen::SelfAdjointEigenSolver<Mat> es(sym(A), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Mat expm(const Mat& M) { return M.exp(); }

void require_nondegenerate(const Mat& A, const std::string& context) {
  Eigen::JacobiSVD<Mat> svd(A);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(svd.singularValues().size() - 1);
  if (smax <= 0.0 || smin <= tol::nondegeneracy * smax) {
    throw ValidationError(context + ": quadratic form is degenerate");
  }
}

}  // namespace tentacle
