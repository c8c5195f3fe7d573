#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tentacle/core.hpp"
#include "tentacle/json_io.hpp"

using namespace tentacle;

namespace {

// Running example: H(x) = (p1^2 + p2^2 + q1^2 - q2^2 - 1)/2 in coordinates
// (q1, q2, p1, p2).
QuadraticHamiltonian hex_hamiltonian() {
  Mat A = Mat::Zero(4, 4);
  A.diagonal() << 1.0, -1.0, 1.0, 1.0;
  return QuadraticHamiltonian(A, 0.5);
}

Mat random_sym(int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat A(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) A(i, j) = gauss(rng);
  }
  return sym(A);
}

}  // namespace

TEST_CASE("standard symplectic structure") {
  const Mat J = standard_j0(3);
  CHECK((J * J + Mat::Identity(6, 6)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((J + J.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(J(0, 3) == 1.0);
  CHECK(J(3, 0) == -1.0);

  // omega0(u, v) = <J0 u, v>; on the first canonical pair it equals -1 with
  // this sign convention, and x^T J0 y = -omega0(x, y) equals +1.
  Vec eq = Vec::Zero(6), ep = Vec::Zero(6);
  eq(0) = 1.0;
  ep(3) = 1.0;
  CHECK(omega0(eq, ep) == doctest::Approx(-1.0));
  CHECK(omega0(ep, eq) == doctest::Approx(1.0));
  CHECK(eq.dot(J * ep) == doctest::Approx(1.0));
}

TEST_CASE("quadratic hamiltonian value and gradient") {
  const auto H = hex_hamiltonian();
  Vec x(4);
  x << 1.0, 2.0, 3.0, 4.0;
  CHECK(H.value(x) == doctest::Approx(0.5 * (1.0 - 4.0 + 9.0 + 16.0) - 0.5));
  CHECK((H.gradient(x) - H.A * x).norm() == doctest::Approx(0.0));
  CHECK(H.dim() == 4);
}

TEST_CASE("asymmetric input is symmetrized or rejected") {
  Mat A(2, 2);
  A << 1.0, 1.0 + 1e-14, 1.0, 2.0;
  const QuadraticHamiltonian H(A, 0.0);
  CHECK(H.A(0, 1) == doctest::Approx(H.A(1, 0)));

  Mat bad(2, 2);
  bad << 1.0, 2.0, 1.0, 2.0;
  CHECK_THROWS_AS(QuadraticHamiltonian(bad, 0.0), ValidationError);
}

TEST_CASE("hamiltonian matrix of the running example") {
  const auto H = hex_hamiltonian();
  const Mat M = hamiltonian_matrix(H);
  Mat expected(4, 4);
  expected << 0, 0, 1, 0, 0, 0, 0, 1, -1, 0, 0, 0, 0, 1, 0, 0;
  CHECK((M - expected).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("poisson bracket of the running example with the radial norm") {
  // F = H_ex, G = |x|^2/2. dF(X_G)(x) = x^T A_F J0 x = -2 q2 p2.
  const auto F = hex_hamiltonian();
  const QuadraticHamiltonian G(Mat::Identity(4, 4), 0.0);
  const auto br = poisson_bracket(F, G);
  Vec x(4);
  x << 0.3, -1.2, 0.7, 0.9;
  CHECK(br.value(x) == doctest::Approx(-2.0 * x(1) * x(3)));
  CHECK(br.c == 0.0);
}

TEST_CASE("bracket antisymmetry and jacobi identity") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const QuadraticHamiltonian F(random_sym(6, 3 * seed), 0.0);
    const QuadraticHamiltonian G(random_sym(6, 3 * seed + 1), 0.0);
    const QuadraticHamiltonian K(random_sym(6, 3 * seed + 2), 0.0);

    const Mat anti = poisson_bracket(F, G).A + poisson_bracket(G, F).A;
    CHECK(anti.cwiseAbs().maxCoeff() < 1e-12 * (1.0 + F.A.cwiseAbs().maxCoeff()));

    const Mat jac = poisson_bracket(poisson_bracket(F, G), K).A +
                    poisson_bracket(poisson_bracket(G, K), F).A +
                    poisson_bracket(poisson_bracket(K, F), G).A;
    CHECK(jac.cwiseAbs().maxCoeff() < 1e-10 * (1.0 + F.A.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("bracket equals the derivative along the flow") {
  const QuadraticHamiltonian F(random_sym(4, 11), 0.7);
  const QuadraticHamiltonian G(random_sym(4, 12), -0.2);
  const Mat MG = standard_j0(2) * G.A;
  std::mt19937_64 rng(13);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double h = 1e-5;
  for (int trial = 0; trial < 5; ++trial) {
    Vec x(4);
    for (int i = 0; i < 4; ++i) x(i) = gauss(rng);
    const Vec fwd = oracle::rk4_linear(MG, x, h, 8);
    const Vec bwd = oracle::rk4_linear(MG, x, -h, 8);
    const double fd = (F.value(fwd) - F.value(bwd)) / (2.0 * h);
    const double exact = poisson_bracket(F, G).value(x);
    CHECK(fd == doctest::Approx(exact).epsilon(1e-6));
  }
}

TEST_CASE("liouville criterion") {
  const int m = 3;
  const LinearField radial{0.5 * Mat::Identity(2 * m, 2 * m)};
  CHECK(is_liouville(radial));

  for (double alpha : {0.0, 0.3, -1.5, 4.0}) {
    CHECK(is_liouville(x_alpha_field(m, alpha)));
  }

  const LinearField skew{standard_j0(m)};
  CHECK_FALSE(is_liouville(skew));

  const auto blend = blend_liouville(radial, x_alpha_field(m, 2.0), 0.37);
  CHECK(is_liouville(blend));
}

TEST_CASE("random symplectic matrices preserve the form") {
  for (std::uint64_t seed : {7ULL, 8ULL, 9ULL}) {
    const Mat S = random_symplectic(3, seed);
    const Mat J = standard_j0(3);
    const double defect = (S.transpose() * J * S - J).cwiseAbs().maxCoeff();
    CHECK(defect < 1e-12);
  }
}

TEST_CASE("matrix exponential against an rk4 integration") {
  const Mat M = standard_j0(2) * random_sym(4, 21);
  const Mat phi = expm(0.7 * M);
  const Mat ref = oracle::rk4_linear_mat(M, 0.7, 4096);
  CHECK((phi - ref).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("nondegeneracy guard") {
  Mat A = Mat::Identity(4, 4);
  A(3, 3) = 1e-12;
  CHECK_THROWS_AS(require_nondegenerate(A, "test"), ValidationError);
  CHECK_NOTHROW(require_nondegenerate(Mat::Identity(4, 4), "test"));
}

TEST_CASE("half integer arithmetic") {
  const auto a = HalfInt::from_twice(3);
  const auto b = HalfInt::whole(2);
  CHECK(a.value() == doctest::Approx(1.5));
  CHECK((a + b).twice == 7);
  CHECK((a - b).twice == -1);
  CHECK(a != b);
  CHECK(HalfInt::whole(1) == HalfInt::from_twice(2));
}

TEST_CASE("hamiltonian json round trip and canonical output") {
  const auto H = hex_hamiltonian();
  const json j = to_json(H);
  const auto back = hamiltonian_from_json(j);
  CHECK((back.A - H.A).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.c == H.c);

  CHECK(canonical_dump(j) == canonical_dump(to_json(back)));
  CHECK(canonical_dump(j).back() == '\n');

  json bad = j;
  bad["dim"] = 6;
  CHECK_THROWS_AS(hamiltonian_from_json(bad), ValidationError);
}
