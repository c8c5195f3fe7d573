#pragma once

// Internal eigenstructure analysis of M = J0 A shared by the classification
// and orbit-enumeration code. Not installed with the public headers.

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "tentacle/core.hpp"
#include "tentacle/hormander.hpp"

namespace tentacle::detail {

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using Cx = std::complex<double>;

// One eigenvalue family folded into the closed first quadrant:
// kind a <-> {+-l}, kind b <-> {+-l1 +- i l2}, kind c <-> {+-i mu}.
struct Family {
  HormanderBlock::Kind kind = HormanderBlock::Kind::a;
  double p1 = 0.0;            // l / l1 / mu
  double p2 = 0.0;            // l2 (kind b)
  int mult = 0;               // algebraic multiplicity of one member eigenvalue
  std::vector<int> box_sizes; // Jordan box sizes, descending, summing to mult
  std::vector<int> idx_main;    // eigen indices at z (first-quadrant member)
  std::vector<int> idx_partner; // indices at -z (kinds a and b)
};

// A sigma-orthogonal symplectic plane of a kind-c family. s = sigma(a, b)
// determines the orientation sign: gamma = sign(s).
struct CPlane {
  Vec a;
  Vec b;
  double s = 0.0;
};

struct SpectralData {
  Mat A;
  Mat J;
  double anorm = 0.0;
  CMat vecs;
  CVec vals;
  std::vector<Family> families;
  bool semisimple = false;
};

// sigma(x, y) = x^T J0 y, complex-bilinear (no conjugation).
Cx sigma_c(const Mat& J, const CVec& x, const CVec& y);
double sigma_r(const Mat& J, const Vec& x, const Vec& y);

SpectralData analyze_spectrum(const QuadraticHamiltonian& H);

// Split a semisimple kind-c family into sigma-orthogonal eigenplanes by
// diagonalizing the Hermitian pairing -i sigma(conj(v), w) on the eigenspace.
// Works for any multiplicity and mixed orientation signs.
std::vector<CPlane> c_family_planes(const SpectralData& sd, const Family& fam);

// Real orthonormal basis of the eigenspace of M for a real eigenvalue,
// recovered from the complex eigenvector columns listed in idx.
Mat real_eigenbasis(const SpectralData& sd, const std::vector<int>& idx);

}  // namespace tentacle::detail
