#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "tentacle/core.hpp"

namespace tentacle {

/// One indecomposable piece of the symplectic normal form of a nondegenerate
/// quadratic Hamiltonian, labelled by the spectrum of J0 A:
///   kind a: a real pair +-lambda, Jordan box size m, dimension 2m;
///   kind b: a complex quadruple +-l1 +- i l2, box size m, dimension 4m;
///   kind c: an imaginary pair +-i mu, box size m, dimension 2m, with an
///           orientation sign gamma (signature of the restricted form).
struct HormanderBlock {
  enum class Kind { a, b, c };

  Kind kind = Kind::a;
  int m = 1;
  double lambda1 = 0.0;  // lambda (kind a), l1 (kind b), mu (kind c)
  double lambda2 = 0.0;  // l2 (kind b only)
  int gamma = 0;         // +-1 for kind c when resolved, 0 when not

  int dimension() const { return kind == Kind::b ? 4 * m : 2 * m; }
};

/// Full classification result. `transform`, when present, has columns forming
/// a symplectic basis adapted to the blocks (x = S y with y block coordinates);
/// `residual` is the max entrywise error of S^T A S against the assembled
/// block-diagonal normal form. The transform is produced only in the
/// semisimple case.
struct Decomposition {
  std::vector<HormanderBlock> blocks;
  bool semisimple = false;
  std::pair<int, int> signature{0, 0};  // (positive, negative) inertia of A
  std::optional<Mat> transform;
  std::optional<double> residual;
};

/// Classify a nondegenerate quadratic Hamiltonian by the eigenstructure of
/// J0 A. Blocks come back canonically sorted: kind a < b < c, then ascending
/// primary parameter, then ascending m.
Decomposition classify(const QuadraticHamiltonian& H);

/// Symmetric matrix A of the representative quadratic form of one block, with
/// <x, A x> equal to the displayed form Q(x,x) of that type (so the
/// Hamiltonian 1/2 <x, A x> has J0 A spectrum exactly at the block's
/// parameters). Coordinates are (q_1..q_d, p_1..p_d) for the block alone.
Mat normal_form(const HormanderBlock& block);

/// Inertia (n_plus, n_minus) of A. Zero eigenvalues (below the relative
/// nondegeneracy threshold) are rejected.
std::pair<int, int> signature(const QuadraticHamiltonian& H);

/// Assembled block-diagonal normal form of a whole decomposition, in the
/// global (q, p) slot ordering the transform's columns use.
Mat assembled_normal_form(const std::vector<HormanderBlock>& blocks);

/// Canonical ordering used by classify.
bool block_order(const HormanderBlock& a, const HormanderBlock& b);

}  // namespace tentacle
