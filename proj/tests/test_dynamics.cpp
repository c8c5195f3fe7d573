#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tentacle/core.hpp"
#include "tentacle/dynamics.hpp"
#include "tentacle/hormander.hpp"
#include "tentacle/json_io.hpp"

using namespace tentacle;

namespace {

constexpr double kPi = 3.14159265358979323846;

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

}  // namespace

TEST_CASE("flow matches an rk4 integration") {
  const auto H = hex_hamiltonian();
  const Mat M = hamiltonian_matrix(H);
  const Mat phi = flow(H, 0.8);
  const Mat ref = oracle::rk4_linear_mat(M, 0.8, 4096);
  CHECK((phi - ref).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("running example flow is periodic on the elliptic plane") {
  const auto H = hex_hamiltonian();
  const Mat phi = flow(H, 2.0 * kPi);
  // Restriction to the (q1, p1) plane returns to the identity.
  CHECK(std::abs(phi(0, 0) - 1.0) < 1e-9);
  CHECK(std::abs(phi(0, 2)) < 1e-9);
  CHECK(std::abs(phi(2, 0)) < 1e-9);
  CHECK(std::abs(phi(2, 2) - 1.0) < 1e-9);
}

TEST_CASE("orbit enumeration on the running example") {
  const auto H = hex_hamiltonian();
  const auto orbits = enumerate_closed_characteristics(H, 2);
  REQUIRE(orbits.size() == 4);

  for (const auto& orb : orbits) {
    CHECK(orb.mu == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(orb.eta == doctest::Approx(2.0 * kPi * orb.k).epsilon(1e-9));
    CHECK(orb.action == doctest::Approx(kPi * orb.k).epsilon(1e-9));

    // x0 lies on the level set and on the invariant plane.
    CHECK(std::abs(H.value(orb.x0)) < 1e-12);
    const Vec residual =
        orb.x0 - orb.plane * (orb.plane.transpose() * orb.x0);
    CHECK(residual.norm() < 1e-9);

    // The orbit closes up after one period.
    const Vec end = flow(H, orb.eta) * orb.x0;
    CHECK((end - orb.x0).norm() < 1e-9);
  }

  // Covers come out in the order 1, -1, 2, -2.
  CHECK(orbits[0].k == 1);
  CHECK(orbits[1].k == -1);
  CHECK(orbits[2].k == 2);
  CHECK(orbits[3].k == -2);
}

TEST_CASE("orbit action closed form on a pure rotation") {
  const QuadraticHamiltonian H(2.0 * Mat::Identity(2, 2), 1.0);
  const auto orbits = enumerate_closed_characteristics(H, 2);
  REQUIRE(orbits.size() == 4);
  for (const auto& orb : orbits) {
    CHECK(orb.mu == doctest::Approx(2.0));
    CHECK(orb.action == doctest::Approx(orb.eta * H.c).epsilon(1e-12));
    CHECK(orbit_action(orb, H, 256) == doctest::Approx(orb.action).epsilon(1e-9));
  }
}

TEST_CASE("enumeration guards") {
  // Negative constant: the level set misses every elliptic plane.
  CHECK_THROWS_AS(enumerate_closed_characteristics(
                      QuadraticHamiltonian(Mat::Identity(2, 2), -1.0), 2),
                  ValidationError);

  // Resonant elliptic frequencies are refused.
  CHECK_THROWS_AS(enumerate_closed_characteristics(
                      QuadraticHamiltonian(Mat::Identity(4, 4), 1.0), 2),
                  UnresolvedError);

  // Jordan elliptic families are refused.
  const Mat A = normal_form(make_block(HormanderBlock::Kind::c, 2, 1.0, 0.0, 1));
  CHECK_THROWS_AS(
      enumerate_closed_characteristics(QuadraticHamiltonian(A, 1.0), 1),
      UnresolvedError);

  // A negative plane never meets the level set: no orbits, no error.
  const auto none = enumerate_closed_characteristics(
      QuadraticHamiltonian(-Mat::Identity(2, 2), 1.0), 2);
  CHECK(none.empty());
}

TEST_CASE("robbin salamon anchors from the generator") {
  const Mat J2 = standard_j0(1);

  const auto full = rs_index(SymplecticPath::from_generator(2.0 * kPi * J2));
  REQUIRE(full.has_value());
  CHECK(*full == HalfInt::whole(2));

  const auto dbl = rs_index(SymplecticPath::from_generator(4.0 * kPi * J2, 512));
  REQUIRE(dbl.has_value());
  CHECK(*dbl == HalfInt::whole(4));

  Mat Bh(2, 2);
  Bh << 1.0, 0.0, 0.0, -1.0;
  const auto hyp = rs_index(SymplecticPath::from_generator(Bh));
  REQUIRE(hyp.has_value());
  CHECK(*hyp == HalfInt::whole(0));

  // Half rotation: only the start is a crossing; half weight of signature 2.
  const auto half = rs_index(SymplecticPath::from_generator(kPi * J2));
  REQUIRE(half.has_value());
  CHECK(*half == HalfInt::whole(1));
}

TEST_CASE("constant identity path is declined") {
  const auto idx = rs_index(SymplecticPath::from_generator(Mat::Zero(2, 2)));
  CHECK_FALSE(idx.has_value());
}

TEST_CASE("path validation") {
  CHECK_THROWS_AS(SymplecticPath::from_generator(Mat::Zero(3, 3)),
                  ValidationError);
  CHECK_THROWS_AS(SymplecticPath::from_generator(Mat::Zero(2, 2), 1),
                  ValidationError);

  // A path that does not start at the identity is rejected.
  SymplecticPath shifted = SymplecticPath::from_generator(kPi * standard_j0(1));
  shifted.samples.front() = 2.0 * Mat::Identity(2, 2);
  CHECK_THROWS_AS(rs_index(shifted), ValidationError);
}

TEST_CASE("transverse index of the running example orbits") {
  const auto H = hex_hamiltonian();
  const auto orbits = enumerate_closed_characteristics(H, 2);
  REQUIRE(orbits.size() == 4);
  for (const auto& orb : orbits) {
    REQUIRE(orb.cz_transverse.has_value());
    CHECK(*orb.cz_transverse == HalfInt::whole(0));
    const auto direct = transverse_cz(orb, H);
    REQUIRE(direct.has_value());
    CHECK(*direct == *orb.cz_transverse);
  }
}

TEST_CASE("transverse index needs a transverse direction") {
  const QuadraticHamiltonian H(2.0 * Mat::Identity(2, 2), 1.0);
  const auto orbits = enumerate_closed_characteristics(H, 1);
  REQUIRE_FALSE(orbits.empty());
  CHECK_THROWS_AS(transverse_cz(orbits.front(), H), ValidationError);
}

TEST_CASE("index helpers") {
  CHECK(signature_index(2, 0) == HalfInt::whole(1));
  CHECK(signature_index(2, 2) == HalfInt::whole(-1));
  CHECK(signature_index(3, 1) == HalfInt::from_twice(1));
  CHECK(grading(HalfInt::whole(1), HalfInt::whole(0)) == HalfInt::from_twice(3));
  CHECK(moduli_dimension(HalfInt::whole(0), HalfInt::whole(1), 1, 1) ==
        doctest::Approx(2.0));
}

TEST_CASE("length action ratio on the running example") {
  const auto H = hex_hamiltonian();
  const auto orbits = enumerate_closed_characteristics(H, 1);
  REQUIRE(orbits.size() == 2);
  for (const auto& orb : orbits) {
    const auto check = length_action_check(orb, H);
    CHECK(check.length == doctest::Approx(2.0 * kPi).epsilon(1e-9));
    CHECK(check.ratio == doctest::Approx(2.0).epsilon(1e-9));
  }
}

TEST_CASE("orbit json round trip") {
  const auto H = hex_hamiltonian();
  const auto orbits = enumerate_closed_characteristics(H, 1);
  REQUIRE_FALSE(orbits.empty());
  const json j = to_json(orbits.front());
  CHECK(j["k"] == 1);
  CHECK(j["mu"].get<double>() == doctest::Approx(1.0));
  REQUIRE(j.contains("cz_transverse"));
  CHECK(j["cz_transverse"].get<double>() == doctest::Approx(0.0));
}
