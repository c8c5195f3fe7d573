#include "spectral.hpp"

#include <algorithm>
#include <cmath>

#include "tentacle/log.hpp"

namespace tentacle::detail {

namespace {

int rank_of(const CMat& M, double rel_tol = 1e-8) {
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<CMat> svd(M);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > rel_tol * sv(0)) ++r;
  }
  return r;
}

// Jordan box sizes of M at eigenvalue z from the rank chain of (M - z)^j.
std::vector<int> jordan_boxes(const CMat& M, Cx z, int alg_mult) {
  const Eigen::Index d = M.rows();
  const CMat S = M - z * CMat::Identity(d, d);
  std::vector<int> ranks{static_cast<int>(d)};
  CMat P = CMat::Identity(d, d);
  for (int j = 1; j <= alg_mult + 1; ++j) {
    P = P * S;
    ranks.push_back(rank_of(P));
    if (ranks[j] == static_cast<int>(d) - alg_mult) break;  // chain stabilized
  }
  std::vector<int> boxes;
  // Number of boxes of size >= j is rank^(j-1) - rank^j.
  for (int j = 1; j + 1 <= static_cast<int>(ranks.size()); ++j) {
    const int ge_j = ranks[j - 1] - ranks[j];
    const int ge_j1 =
        (j + 1 < static_cast<int>(ranks.size())) ? ranks[j] - ranks[j + 1] : 0;
    for (int b = 0; b < ge_j - ge_j1; ++b) boxes.push_back(j);
  }
  std::sort(boxes.rbegin(), boxes.rend());
  return boxes;
}

}  // namespace

Cx sigma_c(const Mat& J, const CVec& x, const CVec& y) {
  return (x.transpose() * J.cast<Cx>() * y)(0, 0);
}

double sigma_r(const Mat& J, const Vec& x, const Vec& y) {
  return x.dot(J * y);
}

SpectralData analyze_spectrum(const QuadraticHamiltonian& H) {
  SpectralData sd;
  sd.A = H.A;
  sd.anorm = opnorm_sym(H.A);
  sd.J = standard_j0(H.dim() / 2);
  require_nondegenerate(H.A, "classify");

  Eigen::EigenSolver<Mat> es(sd.J * H.A);
  if (es.info() != Eigen::Success) {
    throw UnresolvedError("classify: eigensolver failed to converge");
  }
  sd.vals = es.eigenvalues();
  sd.vecs = es.eigenvectors();

  const double axis_tol = tol::axis_rel * std::max(sd.anorm, 1e-300);
  const double group_tol = tol::eig_group_rel * (1.0 + sd.anorm);

  // Snap near-axis eigenvalues onto the axes, then fold into quadrant I.
  const Eigen::Index d = sd.vals.size();
  std::vector<std::pair<double, double>> folded(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    double re = sd.vals(i).real();
    double im = sd.vals(i).imag();
    if (std::abs(im) < axis_tol) im = 0.0;
    if (std::abs(re) < axis_tol) re = 0.0;
    folded[i] = {std::abs(re), std::abs(im)};
  }

  // Greedy clustering of folded values.
  std::vector<int> cluster(d, -1);
  std::vector<std::pair<double, double>> reps;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (int c = 0; c < static_cast<int>(reps.size()); ++c) {
      if (std::abs(folded[i].first - reps[c].first) <= group_tol &&
          std::abs(folded[i].second - reps[c].second) <= group_tol) {
        cluster[i] = c;
        break;
      }
    }
    if (cluster[i] < 0) {
      cluster[i] = static_cast<int>(reps.size());
      reps.push_back(folded[i]);
    }
  }

  for (int c = 0; c < static_cast<int>(reps.size()); ++c) {
    Family fam;
    double re_acc = 0.0, im_acc = 0.0;
    int count = 0;
    for (Eigen::Index i = 0; i < d; ++i) {
      if (cluster[i] != c) continue;
      re_acc += std::abs(sd.vals(i).real());
      im_acc += std::abs(sd.vals(i).imag());
      ++count;
    }
    const bool has_re = reps[c].first > 0.0;
    const bool has_im = reps[c].second > 0.0;
    const double re = has_re ? re_acc / count : 0.0;
    const double im = has_im ? im_acc / count : 0.0;

    if (has_re && has_im) {
      fam.kind = HormanderBlock::Kind::b;
      fam.p1 = re;
      fam.p2 = im;
    } else if (has_re) {
      fam.kind = HormanderBlock::Kind::a;
      fam.p1 = re;
    } else {
      fam.kind = HormanderBlock::Kind::c;
      fam.p1 = im;
    }

    // Sort members of the cluster into quadrants.
    std::vector<int> q_pp, q_pn, q_np, q_nn;  // sign of (re, im)
    for (Eigen::Index i = 0; i < d; ++i) {
      if (cluster[i] != c) continue;
      const bool re_pos = sd.vals(i).real() > 0.0 || !has_re;
      const bool im_pos = sd.vals(i).imag() > 0.0 || !has_im;
      (re_pos ? (im_pos ? q_pp : q_pn) : (im_pos ? q_np : q_nn))
          .push_back(static_cast<int>(i));
    }
    switch (fam.kind) {
      case HormanderBlock::Kind::a:
        // Members split between +l (im treated positive) and -l.
        if (q_pp.size() != q_np.size()) {
          throw UnresolvedError(
              "classify: eigenvalue family violates spectral symmetry");
        }
        fam.idx_main = q_pp;
        fam.idx_partner = q_np;
        break;
      case HormanderBlock::Kind::b:
        if (q_pp.size() != q_nn.size() || q_pn.size() != q_np.size() ||
            q_pp.size() != q_pn.size()) {
          throw UnresolvedError(
              "classify: eigenvalue family violates spectral symmetry");
        }
        fam.idx_main = q_pp;   // z = l1 + i l2
        fam.idx_partner = q_nn;  // -z
        break;
      case HormanderBlock::Kind::c:
        if (q_pp.size() != q_pn.size()) {
          throw UnresolvedError(
              "classify: eigenvalue family violates spectral symmetry");
        }
        fam.idx_main = q_pp;  // +i mu
        break;
    }
    fam.mult = static_cast<int>(fam.idx_main.size());

    Cx z;
    switch (fam.kind) {
      case HormanderBlock::Kind::a: z = Cx(fam.p1, 0.0); break;
      case HormanderBlock::Kind::b: z = Cx(fam.p1, fam.p2); break;
      case HormanderBlock::Kind::c: z = Cx(0.0, fam.p1); break;
    }
    fam.box_sizes = jordan_boxes((sd.J * sd.A).cast<Cx>(), z, fam.mult);
    sd.families.push_back(fam);
  }

  std::sort(sd.families.begin(), sd.families.end(),
            [](const Family& x, const Family& y) {
              if (x.kind != y.kind) return x.kind < y.kind;
              if (x.p1 != y.p1) return x.p1 < y.p1;
              return x.p2 < y.p2;
            });

  // Near-degenerate families are legal but deserve a warning: downstream
  // plane splitting loses accuracy as parameters collide.
  for (std::size_t i = 0; i + 1 < sd.families.size(); ++i) {
    const auto& f0 = sd.families[i];
    const auto& f1 = sd.families[i + 1];
    if (f0.kind == f1.kind &&
        std::abs(f0.p1 - f1.p1) + std::abs(f0.p2 - f1.p2) < tol::eig_near_warn) {
      log::emit(log::Level::warn,
                "classify: eigenvalue families within 1e-5 of each other "
                "(parameters %.12g and %.12g)",
                f0.p1, f1.p1);
    }
  }

  sd.semisimple = true;
  for (const auto& fam : sd.families) {
    for (int b : fam.box_sizes) {
      if (b != 1) sd.semisimple = false;
    }
  }
  return sd;
}

std::vector<CPlane> c_family_planes(const SpectralData& sd, const Family& fam) {
  const int r = fam.mult;
  CMat V(sd.vecs.rows(), r);
  for (int i = 0; i < r; ++i) V.col(i) = sd.vecs.col(fam.idx_main[i]);

  // Hermitian pairing h(v, w) = -i sigma(conj v, w); h(v, v) = 2 sigma(a, b)
  // for v = a + i b. Diagonalizing h splits the eigenspace into planes that
  // are mutually sigma-orthogonal, with gamma read off the sign.
  CMat Gram(r, r);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) {
      Gram(i, j) = Cx(0.0, -1.0) * sigma_c(sd.J, V.col(i).conjugate(), V.col(j));
    }
  }
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (Gram + Gram.adjoint()));
  const CMat W = V * es.eigenvectors();

  std::vector<CPlane> planes;
  for (int k = 0; k < r; ++k) {
    CPlane p;
    p.a = W.col(k).real();
    p.b = W.col(k).imag();
    p.s = sigma_r(sd.J, p.a, p.b);
    planes.push_back(std::move(p));
  }
  // Deterministic order: positive orientation first, then by leading entry.
  std::sort(planes.begin(), planes.end(),
            [](const CPlane& x, const CPlane& y) { return x.s > y.s; });
  return planes;
}

Mat real_eigenbasis(const SpectralData& sd, const std::vector<int>& idx) {
  const int r = static_cast<int>(idx.size());
  Mat stacked(sd.vecs.rows(), 2 * r);
  for (int i = 0; i < r; ++i) {
    stacked.col(2 * i) = sd.vecs.col(idx[i]).real();
    stacked.col(2 * i + 1) = sd.vecs.col(idx[i]).imag();
  }
  Eigen::ColPivHouseholderQR<Mat> qr(stacked);
  qr.setThreshold(1e-10);
  const int rank = static_cast<int>(qr.rank());
  if (rank < r) {
    throw UnresolvedError("classify: real eigenbasis extraction lost rank");
  }
  Mat Q = qr.householderQ() * Mat::Identity(stacked.rows(), r);
  return Q;
}

}  // namespace tentacle::detail
