#include "tentacle/hormander.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spectral.hpp"
#include "tentacle/log.hpp"

namespace tentacle {

using detail::CMat;
using detail::CVec;
using detail::Cx;

bool block_order(const HormanderBlock& a, const HormanderBlock& b) {
  if (a.kind != b.kind) return a.kind < b.kind;
  if (a.lambda1 != b.lambda1) return a.lambda1 < b.lambda1;
  if (a.m != b.m) return a.m < b.m;
  if (a.lambda2 != b.lambda2) return a.lambda2 < b.lambda2;
  return a.gamma < b.gamma;
}

Mat normal_form(const HormanderBlock& block) {
  if (block.m < 1) throw ValidationError("normal_form: box size must be >= 1");
  const int m = block.m;
  switch (block.kind) {
    case HormanderBlock::Kind::a: {
      // <x, A x> = 2 l sum q_j p_j + 2 sum q_{j+1} p_j.
      Mat N = block.lambda1 * Mat::Identity(m, m);
      for (int j = 0; j + 1 < m; ++j) N(j + 1, j) = 1.0;
      Mat A = Mat::Zero(2 * m, 2 * m);
      A.topRightCorner(m, m) = N;
      A.bottomLeftCorner(m, m) = N.transpose();
      return A;
    }
    case HormanderBlock::Kind::b: {
      // On R^{4m}: <x, A x> = 2 (sum_{j<=2m-2} q_j p_{j+2}
      //   + l1 sum q_j p_j + l2 sum_j (q_{2j} p_{2j-1} - q_{2j-1} p_{2j})).
      const int d = 2 * m;
      Mat N = block.lambda1 * Mat::Identity(d, d);
      for (int j = 0; j + 2 < d; ++j) N(j, j + 2) = 1.0;
      for (int j = 0; j < m; ++j) {
        N(2 * j + 1, 2 * j) += block.lambda2;
        N(2 * j, 2 * j + 1) -= block.lambda2;
      }
      Mat A = Mat::Zero(2 * d, 2 * d);
      A.topRightCorner(d, d) = N;
      A.bottomLeftCorner(d, d) = N.transpose();
      return A;
    }
    case HormanderBlock::Kind::c: {
      if (block.gamma != 1 && block.gamma != -1) {
        throw ValidationError("normal_form: kind c requires a resolved gamma");
      }
      const double mu = block.lambda1;
      const double g = block.gamma;
      Mat F = Mat::Zero(m, m);
      for (int j = 0; j < m; ++j) F(j, m - 1 - j) = 1.0;
      Mat P = Mat::Zero(m, m);  // q_j q_{m+2-j}, j = 2..m (0-based: (j, m-j))
      for (int j = 1; j < m; ++j) P(j, m - j) = 1.0;
      Mat G = Mat::Zero(m, m);  // p_j p_{m-j}, j = 1..m-1 (0-based: (j, m-2-j))
      for (int j = 0; j + 1 < m; ++j) G(j, m - 2 - j) = 1.0;
      Mat A = Mat::Zero(2 * m, 2 * m);
      A.topLeftCorner(m, m) = g * (mu * F - P);
      A.bottomRightCorner(m, m) = g * (mu * F - G);
      return A;
    }
  }
  throw ValidationError("normal_form: unknown kind");
}

Mat assembled_normal_form(const std::vector<HormanderBlock>& blocks) {
  int n = 0;
  for (const auto& b : blocks) n += b.dimension() / 2;
  Mat A = Mat::Zero(2 * n, 2 * n);
  int off = 0;
  for (const auto& b : blocks) {
    const Mat loc = normal_form(b);
    const int nb = b.dimension() / 2;
    auto g = [&](int i) { return i < nb ? off + i : n + off + (i - nb); };
    for (int i = 0; i < 2 * nb; ++i) {
      for (int j = 0; j < 2 * nb; ++j) A(g(i), g(j)) = loc(i, j);
    }
    off += nb;
  }
  return A;
}

std::pair<int, int> signature(const QuadraticHamiltonian& H) {
  Eigen::SelfAdjointEigenSolver<Mat> es(H.A, Eigen::EigenvaluesOnly);
  const Vec ev = es.eigenvalues();
  const double thr = tol::nondegeneracy * ev.cwiseAbs().maxCoeff();
  int pos = 0, neg = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > thr) {
      ++pos;
    } else if (ev(i) < -thr) {
      ++neg;
    } else {
      throw ValidationError("signature: quadratic form is degenerate");
    }
  }
  return {pos, neg};
}

namespace {

// Block plus the adapted basis columns it contributes to the transform.
struct BlockBuild {
  HormanderBlock blk;
  std::vector<Vec> qcols;
  std::vector<Vec> pcols;
};

// Signature of C^T A C for a (not necessarily orthonormal) real basis C.
std::pair<int, int> restricted_signature(const Mat& A, const Mat& C) {
  const Mat R = C.transpose() * A * C;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (R + R.transpose()),
                                        Eigen::EigenvaluesOnly);
  const Vec ev = es.eigenvalues();
  const double thr = 1e-10 * std::max(1.0, ev.cwiseAbs().maxCoeff());
  int pos = 0, neg = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > thr) ++pos;
    if (ev(i) < -thr) ++neg;
  }
  return {pos, neg};
}

// Real basis of the invariant subspace of a +-i mu family with Jordan boxes,
// from the complex generalized eigenspace.
Mat generalized_real_basis(const detail::SpectralData& sd,
                           const detail::Family& fam) {
  const Eigen::Index d = sd.A.rows();
  const int maxbox =
      *std::max_element(fam.box_sizes.begin(), fam.box_sizes.end());
  CMat S = (sd.J * sd.A).cast<Cx>() -
           Cx(0.0, fam.p1) * CMat::Identity(d, d);
  CMat P = CMat::Identity(d, d);
  for (int j = 0; j < maxbox; ++j) P = P * S;
  Eigen::JacobiSVD<CMat> svd(P, Eigen::ComputeFullV);
  CMat V = svd.matrixV().rightCols(fam.mult);
  Mat stacked(d, 2 * fam.mult);
  stacked.leftCols(fam.mult) = V.real();
  stacked.rightCols(fam.mult) = V.imag();
  Eigen::ColPivHouseholderQR<Mat> qr(stacked);
  qr.setThreshold(1e-10);
  if (static_cast<int>(qr.rank()) < 2 * fam.mult) {
    throw UnresolvedError("classify: generalized eigenspace lost rank");
  }
  return qr.householderQ() * Mat::Identity(d, 2 * fam.mult);
}

// gamma values for the kind-c boxes of one family that is not semisimple.
// Only odd boxes carry a sign; it is recovered from the restricted signature
// when the arithmetic pins it down, otherwise left unresolved (0).
void assign_gamma_nonsemisimple(const detail::SpectralData& sd,
                                const detail::Family& fam,
                                std::vector<HormanderBlock>& out) {
  const Mat C = generalized_real_basis(sd, fam);
  const auto [pos, neg] = restricted_signature(sd.A, C);
  const int diff = pos - neg;  // = 2 sum of odd-box gammas
  std::vector<HormanderBlock*> odd;
  for (auto& b : out) {
    if (b.m % 2 == 1) odd.push_back(&b);
  }
  if (odd.empty()) return;  // even boxes: no sign to assign
  if (static_cast<int>(odd.size()) == 1 && (diff == 2 || diff == -2)) {
    odd[0]->gamma = diff / 2;
  } else if (std::abs(diff) == 2 * static_cast<int>(odd.size())) {
    for (auto* b : odd) b->gamma = diff > 0 ? 1 : -1;
  }
  // Anything else stays unresolved: several odd boxes of mixed sign cannot
  // be told apart from the family-level signature alone.
}

}  // namespace

Decomposition classify(const QuadraticHamiltonian& H) {
  const detail::SpectralData sd = detail::analyze_spectrum(H);
  const int n = H.dim() / 2;

  std::vector<BlockBuild> builds;
  for (const auto& fam : sd.families) {
    const bool fam_semisimple =
        std::all_of(fam.box_sizes.begin(), fam.box_sizes.end(),
                    [](int b) { return b == 1; });

    if (!fam_semisimple) {
      std::vector<HormanderBlock> fam_blocks;
      for (int box : fam.box_sizes) {
        HormanderBlock b;
        b.kind = fam.kind;
        b.m = box;
        b.lambda1 = fam.p1;
        b.lambda2 = fam.p2;
        fam_blocks.push_back(b);
      }
      if (fam.kind == HormanderBlock::Kind::c) {
        assign_gamma_nonsemisimple(sd, fam, fam_blocks);
      }
      for (auto& b : fam_blocks) builds.push_back(BlockBuild{b, {}, {}});
      continue;
    }

    switch (fam.kind) {
      case HormanderBlock::Kind::a: {
        const Mat U = detail::real_eigenbasis(sd, fam.idx_main);
        const Mat W = detail::real_eigenbasis(sd, fam.idx_partner);
        const Mat P = U.transpose() * sd.J * W;
        const Mat Wd = W * P.inverse();  // u_i^T J0 w'_j = delta_ij
        for (int i = 0; i < fam.mult; ++i) {
          HormanderBlock b;
          b.kind = fam.kind;
          b.m = 1;
          b.lambda1 = fam.p1;
          builds.push_back(BlockBuild{b, {U.col(i)}, {Wd.col(i)}});
        }
        break;
      }
      case HormanderBlock::Kind::b: {
        CMat V(2 * n, fam.mult), W(2 * n, fam.mult);
        for (int i = 0; i < fam.mult; ++i) {
          V.col(i) = sd.vecs.col(fam.idx_main[i]);
          W.col(i) = sd.vecs.col(fam.idx_partner[i]);
        }
        CMat Gram(fam.mult, fam.mult);
        for (int i = 0; i < fam.mult; ++i) {
          for (int j = 0; j < fam.mult; ++j) {
            Gram(i, j) = detail::sigma_c(sd.J, V.col(i), W.col(j));
          }
        }
        const CMat Wd = 2.0 * W * Gram.inverse();  // sigma(v_i, w'_j) = 2 d_ij
        for (int i = 0; i < fam.mult; ++i) {
          HormanderBlock b;
          b.kind = fam.kind;
          b.m = 1;
          b.lambda1 = fam.p1;
          b.lambda2 = fam.p2;
          const Vec q1 = V.col(i).real(), q2 = V.col(i).imag();
          const Vec p1 = Wd.col(i).real(), p2 = -Wd.col(i).imag();
          builds.push_back(BlockBuild{b, {q1, q2}, {p1, p2}});
        }
        break;
      }
      case HormanderBlock::Kind::c: {
        for (const auto& plane : detail::c_family_planes(sd, fam)) {
          HormanderBlock b;
          b.kind = fam.kind;
          b.m = 1;
          b.lambda1 = fam.p1;
          if (std::abs(plane.s) < 1e-12) {
            throw UnresolvedError(
                "classify: elliptic eigenplane is symplectically degenerate");
          }
          b.gamma = plane.s > 0.0 ? 1 : -1;
          const double r = 1.0 / std::sqrt(std::abs(plane.s));
          Vec q = plane.a * r, p = plane.b * r;
          if (b.gamma < 0) std::swap(q, p);
          builds.push_back(BlockBuild{b, {q}, {p}});
        }
        break;
      }
    }
  }

  std::sort(builds.begin(), builds.end(),
            [](const BlockBuild& x, const BlockBuild& y) {
              return block_order(x.blk, y.blk);
            });

  Decomposition dec;
  for (const auto& bb : builds) dec.blocks.push_back(bb.blk);
  dec.semisimple = sd.semisimple;
  dec.signature = signature(H);

  int total = 0;
  for (const auto& b : dec.blocks) total += b.dimension();
  if (total != H.dim()) {
    throw UnresolvedError("classify: block dimensions do not fill the space");
  }

  if (sd.semisimple) {
    Mat S(2 * n, 2 * n);
    int off = 0;
    for (const auto& bb : builds) {
      const int nb = bb.blk.dimension() / 2;
      for (int i = 0; i < nb; ++i) {
        S.col(off + i) = bb.qcols[i];
        S.col(n + off + i) = bb.pcols[i];
      }
      off += nb;
    }
    const Mat target = assembled_normal_form(dec.blocks);
    const double res = (S.transpose() * H.A * S - target).cwiseAbs().maxCoeff();
    const double symp_res =
        (S.transpose() * sd.J * S - sd.J).cwiseAbs().maxCoeff();
    if (symp_res > tol::symplectic) {
      log::emit(log::Level::warn,
                "classify: adapted basis misses symplecticity by %.3e", symp_res);
    }
    dec.transform = S;
    dec.residual = res;
  }
  return dec;
}

}  // namespace tentacle
