#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tentacle/core.hpp"
#include "tentacle/hormander.hpp"

namespace tentacle {

enum class AxiomStatus { verified, criteria_not_met, unresolved };

enum class Overall { strongly_tentacular, criteria_not_met, unresolved };

/// Per-block data of the h1/h3 witness field: the coupling strength alpha
/// used for the block and the closed-form coercivity constant of the proof.
struct WitnessBlockData {
  HormanderBlock block;
  double alpha = 0.0;
  double c_formula = 0.0;
};

/// Certificate for h1 and h3: a Liouville field X (in input coordinates)
/// with dH(X)(x) >= c_lower |x|^2. c_lower is the minimum eigenvalue of
/// sym(A L), exact for quadratic data and replayable without the search.
struct WitnessCertificate {
  LinearField X;
  double c_lower = 0.0;
  std::vector<WitnessBlockData> per_block;
};

/// Certificate for h4: eps with min-eigenvalue(Bbar + eps A) > 0, plus the
/// eigenvalue itself and Bbar for replay.
struct H4Certificate {
  double eps = 0.0;
  double min_eig = 0.0;
  Mat bbar;
};

struct AxiomVerdict {
  std::string axiom;  // "h1".."h4"
  AxiomStatus status = AxiomStatus::unresolved;
  std::string note;
  std::optional<WitnessCertificate> witness;  // h1/h3 when verified
  std::optional<H4Certificate> h4;            // h4 when verified
};

struct TentacularReport {
  Decomposition decomposition;
  std::vector<AxiomVerdict> verdicts;  // h1, h2, h3, h4 in order
  Overall overall = Overall::unresolved;
};

/// Sufficient-criteria table for one block:
///   kind a/b: m = 1 always; m = 2 needs primary > 1/sqrt(2); m > 2 needs
///   primary > 2;  kind c: m = 1 and gamma = +1.
bool check_block_criteria(const HormanderBlock& block);

/// Bbar = A^2 + sym((J0 A)^2); the second derivative of |x|^2/2 along the
/// flow is <x, Bbar x>.
Mat bbar(const QuadraticHamiltonian& H);

/// Eigenvalues of the m x m comparison matrix
///   b_11 = 2 l^2, b_ll = 1 + 2 l^2 (l >= 2), 2 l on the first off-diagonal,
///   1/2 on the second, 0 beyond,
/// controlling Bbar-positivity for kind a/b blocks (l is lambda for kind a,
/// l1 for kind b). Kind c input is an error.
Vec bbar_block_spectrum(const HormanderBlock& block);

/// The comparison matrix itself (exposed for tests and diagnostics).
Mat bbar_block_matrix(int m, double l);

/// Verify h1 and h3 by constructing the blockwise witness field
/// S (sum_i X^{alpha_i}) S^{-1}. Requires a semisimple decomposition with a
/// transform; all blocks must pass check_block_criteria. The certificate is
/// re-validated by sampling dH(X)(x) >= 0.99 c_lower |x|^2 before returning.
AxiomVerdict witness_h1_h3(const QuadraticHamiltonian& H,
                           const Decomposition& dec, const std::string& axiom);

/// h2 holds identically for quadratic Hamiltonians (they are their own
/// quadratic-growth envelope); records the trivial certificate.
AxiomVerdict check_h2(const QuadraticHamiltonian& H);

/// Search eps in (0, eps_max], eps_max = 2|A| + 1, on a dyadic grid refined
/// by bisection, for min-eigenvalue(Bbar + eps A) > 0. Positivity threshold
/// is 1e-10 (1 + |Bbar|).
AxiomVerdict check_h4(const QuadraticHamiltonian& H);

/// Run the whole battery: classification, per-block criteria, h1..h4.
TentacularReport full_report(const QuadraticHamiltonian& H);

/// Re-validate every verified verdict of a report from its certificate alone
/// (no search, no witness reconstruction). Returns false if any replay fails.
bool replay(const TentacularReport& report, const QuadraticHamiltonian& H);

}  // namespace tentacle
