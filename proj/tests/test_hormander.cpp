#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>

#include "oracles.hpp"
#include "tentacle/core.hpp"
#include "tentacle/hormander.hpp"
#include "tentacle/json_io.hpp"

using namespace tentacle;

namespace {

QuadraticHamiltonian hex_hamiltonian() {
  Mat A = Mat::Zero(4, 4);
  A.diagonal() << 1.0, -1.0, 1.0, 1.0;
  return QuadraticHamiltonian(A, 0.5);
}

HormanderBlock make_block(HormanderBlock::Kind kind, int m, double l1,
                          double l2 = 0.0, int gamma = 0) {
  HormanderBlock b;
  b.kind = kind;
  b.m = m;
  b.lambda1 = l1;
  b.lambda2 = l2;
  b.gamma = gamma;
  return b;
}

// Eigenvalues of J0 A for the normal form of one block.
Eigen::VectorXcd block_spectrum(const HormanderBlock& b) {
  const Mat A = normal_form(b);
  const int n = static_cast<int>(A.rows()) / 2;
  return Eigen::EigenSolver<Mat>(standard_j0(n) * A).eigenvalues();
}

bool spectrum_contains(const Eigen::VectorXcd& spec, std::complex<double> z,
                       double tol = 1e-8) {
  for (int i = 0; i < spec.size(); ++i) {
    if (std::abs(spec(i) - z) < tol) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("running example classification") {
  const auto dec = classify(hex_hamiltonian());
  REQUIRE(dec.blocks.size() == 2);
  CHECK(dec.semisimple);

  const auto& a = dec.blocks[0];
  CHECK(a.kind == HormanderBlock::Kind::a);
  CHECK(a.m == 1);
  CHECK(a.lambda1 == doctest::Approx(1.0).epsilon(1e-9));

  const auto& c = dec.blocks[1];
  CHECK(c.kind == HormanderBlock::Kind::c);
  CHECK(c.m == 1);
  CHECK(c.lambda1 == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(c.gamma == 1);

  CHECK(dec.signature.first == 3);
  CHECK(dec.signature.second == 1);
  REQUIRE(dec.transform.has_value());
  REQUIRE(dec.residual.has_value());
  CHECK(*dec.residual < tol::transform_residual);

  // The transform is symplectic and conjugates A onto the assembled form.
  const Mat& S = *dec.transform;
  const Mat J = standard_j0(2);
  CHECK((S.transpose() * J * S - J).cwiseAbs().maxCoeff() < 1e-9);
  const Mat target = assembled_normal_form(dec.blocks);
  CHECK((S.transpose() * hex_hamiltonian().A * S - target).cwiseAbs().maxCoeff() <
        1e-7);
}

TEST_CASE("normal forms of small blocks") {
  Mat a1 = normal_form(make_block(HormanderBlock::Kind::a, 1, 2.5));
  Mat a1_expected(2, 2);
  a1_expected << 0.0, 2.5, 2.5, 0.0;
  CHECK((a1 - a1_expected).cwiseAbs().maxCoeff() == 0.0);

  Mat c1 = normal_form(make_block(HormanderBlock::Kind::c, 1, 3.0, 0.0, 1));
  CHECK((c1 - 3.0 * Mat::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);

  Mat c1n = normal_form(make_block(HormanderBlock::Kind::c, 1, 3.0, 0.0, -1));
  CHECK((c1n + 3.0 * Mat::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(normal_form(make_block(HormanderBlock::Kind::c, 1, 3.0)),
                  ValidationError);
}

TEST_CASE("normal form spectra match the block parameters") {
  // Jordan boxes split eigenvalues at the square root of machine precision,
  // so the m = 2 checks use a loose tolerance.
  const auto sa = block_spectrum(make_block(HormanderBlock::Kind::a, 2, 1.7));
  CHECK(spectrum_contains(sa, {1.7, 0.0}, 1e-5));
  CHECK(spectrum_contains(sa, {-1.7, 0.0}, 1e-5));

  const auto sb =
      block_spectrum(make_block(HormanderBlock::Kind::b, 1, 0.8, 1.3));
  CHECK(spectrum_contains(sb, {0.8, 1.3}));
  CHECK(spectrum_contains(sb, {0.8, -1.3}));
  CHECK(spectrum_contains(sb, {-0.8, 1.3}));
  CHECK(spectrum_contains(sb, {-0.8, -1.3}));

  const auto sc =
      block_spectrum(make_block(HormanderBlock::Kind::c, 2, 2.2, 0.0, 1));
  CHECK(spectrum_contains(sc, {0.0, 2.2}, 1e-5));
  CHECK(spectrum_contains(sc, {0.0, -2.2}, 1e-5));
}

TEST_CASE("kind a jordan structure for m = 2") {
  const Mat A = normal_form(make_block(HormanderBlock::Kind::a, 2, 1.5));
  const Mat M = standard_j0(2) * A;
  // One Jordan box of size 2 at +lambda: rank(M - lambda I) = 3.
  Eigen::FullPivLU<Mat> lu(M - 1.5 * Mat::Identity(4, 4));
  lu.setThreshold(1e-8);
  CHECK(lu.rank() == 3);
}

TEST_CASE("non-semisimple input is detected and carries no transform") {
  const Mat A = normal_form(make_block(HormanderBlock::Kind::a, 2, 1.0));
  const auto dec = classify(QuadraticHamiltonian(A, 1.0));
  CHECK_FALSE(dec.semisimple);
  CHECK_FALSE(dec.transform.has_value());
  REQUIRE(dec.blocks.size() == 1);
  CHECK(dec.blocks[0].kind == HormanderBlock::Kind::a);
  CHECK(dec.blocks[0].m == 2);
  CHECK(dec.blocks[0].lambda1 == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("negative definite plane classifies with gamma = -1") {
  const auto dec = classify(QuadraticHamiltonian(-Mat::Identity(2, 2), 1.0));
  REQUIRE(dec.blocks.size() == 1);
  CHECK(dec.blocks[0].kind == HormanderBlock::Kind::c);
  CHECK(dec.blocks[0].lambda1 == doctest::Approx(1.0));
  CHECK(dec.blocks[0].gamma == -1);
  CHECK(dec.signature.first == 0);
  CHECK(dec.signature.second == 2);
}

TEST_CASE("round trip through an assembled normal form") {
  std::vector<HormanderBlock> blocks{
      make_block(HormanderBlock::Kind::a, 1, 0.6),
      make_block(HormanderBlock::Kind::c, 1, 1.9, 0.0, 1),
      make_block(HormanderBlock::Kind::c, 1, 0.9, 0.0, -1)};
  std::sort(blocks.begin(), blocks.end(), block_order);
  const Mat A = assembled_normal_form(blocks);
  const auto dec = classify(QuadraticHamiltonian(A, 1.0));
  REQUIRE(dec.blocks.size() == 3);
  CHECK(dec.semisimple);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    CHECK(dec.blocks[i].kind == blocks[i].kind);
    CHECK(dec.blocks[i].m == blocks[i].m);
    CHECK(dec.blocks[i].lambda1 ==
          doctest::Approx(blocks[i].lambda1).epsilon(1e-8));
    CHECK(dec.blocks[i].gamma == blocks[i].gamma);
  }
}

TEST_CASE("classification parameters survive a symplectic conjugation") {
  const auto H = hex_hamiltonian();
  const Mat S = random_symplectic(2, 42);
  const QuadraticHamiltonian conj(S.transpose() * H.A * S, H.c);
  const auto dec = classify(conj);
  REQUIRE(dec.blocks.size() == 2);
  CHECK(dec.blocks[0].kind == HormanderBlock::Kind::a);
  CHECK(dec.blocks[0].lambda1 == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(dec.blocks[1].kind == HormanderBlock::Kind::c);
  CHECK(dec.blocks[1].lambda1 == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(dec.blocks[1].gamma == 1);
}

TEST_CASE("degenerate quadratic forms are rejected") {
  Mat A = Mat::Identity(4, 4);
  A(2, 2) = 0.0;
  CHECK_THROWS_AS(classify(QuadraticHamiltonian(A, 1.0)), ValidationError);
  CHECK_THROWS_AS(signature(QuadraticHamiltonian(A, 1.0)), ValidationError);
}

TEST_CASE("block ordering is kind then parameter then size") {
  const auto a_small = make_block(HormanderBlock::Kind::a, 1, 0.5);
  const auto a_large = make_block(HormanderBlock::Kind::a, 1, 2.0);
  const auto c_block = make_block(HormanderBlock::Kind::c, 1, 0.1, 0.0, 1);
  CHECK(block_order(a_small, a_large));
  CHECK(block_order(a_large, c_block));
  CHECK_FALSE(block_order(c_block, a_small));
}

TEST_CASE("decomposition json round trip") {
  const auto dec = classify(hex_hamiltonian());
  const auto back = decomposition_from_json(to_json(dec));
  REQUIRE(back.blocks.size() == dec.blocks.size());
  CHECK(back.semisimple == dec.semisimple);
  CHECK(back.signature == dec.signature);
  CHECK(back.blocks[1].gamma == dec.blocks[1].gamma);
  REQUIRE(back.transform.has_value());
  CHECK((*back.transform - *dec.transform).cwiseAbs().maxCoeff() == 0.0);
}
