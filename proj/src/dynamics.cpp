#include "tentacle/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "spectral.hpp"
#include "tentacle/log.hpp"

namespace tentacle {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

// Deterministic sign convention: first coordinate that carries weight is
// made positive.
void canonical_sign(Vec& x) {
  const double thr = 1e-12 * x.norm();
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (std::abs(x(i)) > thr) {
      if (x(i) < 0.0) x = -x;
      return;
    }
  }
}

}  // namespace

Mat flow(const QuadraticHamiltonian& H, double t) {
  return expm(t * hamiltonian_matrix(H));
}

SymplecticPath SymplecticPath::from_generator(const Mat& B, int sample_count) {
  if (sample_count < 2) {
    throw ValidationError("SymplecticPath: need at least two samples");
  }
  if (B.rows() != B.cols() || B.rows() % 2 != 0) {
    throw ValidationError("SymplecticPath: generator must be even square");
  }
  SymplecticPath path;
  path.generator = B;
  path.samples.reserve(sample_count);
  const Mat step = expm(B / (sample_count - 1));
  Mat cur = Mat::Identity(B.rows(), B.cols());
  for (int j = 0; j < sample_count; ++j) {
    path.samples.push_back(cur);
    cur = step * cur;
  }
  return path;
}

std::vector<ClosedCharacteristic> enumerate_closed_characteristics(
    const QuadraticHamiltonian& H, int k_max) {
  if (k_max < 1) throw ValidationError("k_max must be >= 1");
  if (!(H.c > 0.0)) {
    throw ValidationError(
        "closed-characteristic enumeration needs c > 0 (the level set "
        "<x, A x> = 2c must be reachable by elliptic planes)");
  }

  const detail::SpectralData sd = detail::analyze_spectrum(H);

  std::vector<ClosedCharacteristic> out;
  for (const auto& fam : sd.families) {
    if (fam.kind != HormanderBlock::Kind::c) continue;
    const bool fam_semisimple =
        std::all_of(fam.box_sizes.begin(), fam.box_sizes.end(),
                    [](int b) { return b == 1; });
    if (!fam_semisimple) {
      throw UnresolvedError(
          "elliptic family with a nontrivial Jordan box; orbit enumeration "
          "covers the semisimple case only");
    }
    if (fam.mult > 1) {
      throw UnresolvedError(
          "resonant elliptic spectrum (repeated frequency); the orbits form "
          "tori, not isolated circles");
    }

    const auto planes = detail::c_family_planes(sd, fam);
    const auto& plane = planes.front();
    const double mu = fam.p1;
    if (!(plane.s > 0.0)) continue;  // negative planes miss the level set

    const double r = std::sqrt(2.0 * H.c / (mu * plane.s));
    Vec x0 = r * plane.a;
    canonical_sign(x0);

    // Orthonormal basis of the plane, for reporting only.
    Mat basis(H.dim(), 2);
    Vec e1 = plane.a / plane.a.norm();
    Vec e2 = plane.b - e1.dot(plane.b) * e1;
    e2 /= e2.norm();
    canonical_sign(e1);
    canonical_sign(e2);
    basis.col(0) = e1;
    basis.col(1) = e2;

    for (int kk = 1; kk <= k_max; ++kk) {
      for (int sign : {1, -1}) {
        ClosedCharacteristic orb;
        orb.plane = basis;
        orb.mu = mu;
        orb.k = sign * kk;
        orb.eta = kTwoPi * orb.k / mu;
        orb.x0 = x0;
        orb.action = 0.0;
        out.push_back(orb);
      }
    }
  }

  for (auto& orb : out) {
    orb.action = orbit_action(orb, H);
    if (H.dim() >= 4) orb.cz_transverse = transverse_cz(orb, H);
  }
  return out;
}

double orbit_action(const ClosedCharacteristic& orbit,
                    const QuadraticHamiltonian& H, int n_quad) {
  if (n_quad < 2) throw ValidationError("orbit_action: n_quad must be >= 2");
  const Mat M = hamiltonian_matrix(H);
  const Mat step = expm((orbit.eta / n_quad) * M);
  const Mat J = standard_j0(H.dim() / 2);

  // Trapezoid over the periodic grid is the plain nodal mean. The tangent
  // vector at each node is exact: d_t v = eta M v.
  double kin = 0.0, pot = 0.0;
  Vec v = orbit.x0;
  for (int j = 0; j < n_quad; ++j) {
    const Vec dv = orbit.eta * (M * v);
    kin += 0.5 * (J * v).dot(dv);  // lambda0(d_t v) = omega0(v/2, d_t v)
    pot += H.value(v);
    v = step * v;
  }
  return kin / n_quad - orbit.eta * pot / n_quad;
}

LengthActionCheck length_action_check(const ClosedCharacteristic& orbit,
                                      const QuadraticHamiltonian& H,
                                      int n_quad) {
  if (n_quad < 2) {
    throw ValidationError("length_action_check: n_quad must be >= 2");
  }
  const Mat M = hamiltonian_matrix(H);
  const Mat step = expm((orbit.eta / n_quad) * M);
  double len = 0.0;
  Vec v = orbit.x0;
  for (int j = 0; j < n_quad; ++j) {
    len += (orbit.eta * (M * v)).norm();
    v = step * v;
  }
  len /= n_quad;

  LengthActionCheck chk;
  chk.length = len;
  chk.action = orbit_action(orbit, H, n_quad);
  if (chk.action == 0.0) {
    throw ValidationError("length_action_check: orbit has zero action");
  }
  chk.ratio = chk.length / std::abs(chk.action);
  return chk;
}

namespace {

struct CrossingData {
  double t = 0.0;
  int sgn = 0;       // signature of the crossing form on the kernel
  bool ok = false;   // false: degenerate crossing, index unresolved
};

// Crossing form matrix at parameter t: for Psi' = B Psi the form on
// ker(Psi(t) - I) is omega0(xi, B xi) = <xi, -sym(J0 B) xi>.
Mat crossing_form_matrix(const Mat& B, const Mat& J) {
  return -sym(J * B);
}

// Evaluate the crossing form on the numerical kernel of Psi - I.
CrossingData evaluate_crossing(const Mat& Psi, const Mat& S_form, double t) {
  CrossingData cd;
  cd.t = t;
  const Mat D = Psi - Mat::Identity(Psi.rows(), Psi.cols());
  Eigen::JacobiSVD<Mat> svd(D, Eigen::ComputeFullV);
  const Vec sv = svd.singularValues();
  // Kernel threshold with an absolute floor: when Psi returns to the
  // identity, D is pure roundoff and every direction belongs to the kernel,
  // which a threshold relative to sigma_max(D) alone would never admit.
  const double thr_kernel = 1e-8 * (1.0 + sv(0));
  int kdim = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) <= thr_kernel) ++kdim;
  }
  if (kdim == 0) return cd;  // no kernel resolved: degenerate
  const Mat Z = svd.matrixV().rightCols(kdim);
  const Mat K = Z.transpose() * S_form * Z;
  Eigen::SelfAdjointEigenSolver<Mat> es(sym(K), Eigen::EigenvaluesOnly);
  const Vec ev = es.eigenvalues();
  const double thr = 1e-10 * (1.0 + opnorm_sym(S_form));
  int pos = 0, neg = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > thr) {
      ++pos;
    } else if (ev(i) < -thr) {
      ++neg;
    } else {
      return cd;  // kernel vector with vanishing crossing form: unresolved
    }
  }
  cd.sgn = pos - neg;
  cd.ok = true;
  return cd;
}

}  // namespace

std::optional<HalfInt> rs_index(const SymplecticPath& path) {
  if (path.samples.size() < 2) {
    throw ValidationError("rs_index: path needs at least two samples");
  }
  const int d = path.dim();
  if (d < 2 || d % 2 != 0) {
    throw ValidationError("rs_index: path dimension must be even and >= 2");
  }
  const Mat J = standard_j0(d / 2);
  const Mat I = Mat::Identity(d, d);
  if ((path.samples.front() - I).cwiseAbs().maxCoeff() > 1e-9) {
    throw ValidationError("rs_index: path must start at the identity");
  }
  for (const Mat& Psi : path.samples) {
    const double scale = 1.0 + Psi.cwiseAbs().maxCoeff();
    const double defect =
        (Psi.transpose() * J * Psi - J).cwiseAbs().maxCoeff();
    if (defect > tol::symplectic * scale * scale) {
      throw ValidationError("rs_index: sample is not symplectic");
    }
  }

  const bool have_gen = path.generator.has_value();

  // Dense evaluation grid. With a generator the path is re-evaluated exactly
  // on 2048 nodes and anywhere bisection needs it; raw sample paths are
  // limited to their own nodes.
  std::vector<Mat> dense;
  std::vector<double> tgrid;
  if (have_gen) {
    const int n_dense = 2048;
    const Mat step = expm(*path.generator / n_dense);
    Mat cur = I;
    for (int j = 0; j <= n_dense; ++j) {
      dense.push_back(cur);
      tgrid.push_back(static_cast<double>(j) / n_dense);
      cur = step * cur;
    }
  } else {
    dense = path.samples;
    const int S = static_cast<int>(path.samples.size());
    for (int j = 0; j < S; ++j) {
      tgrid.push_back(static_cast<double>(j) / (S - 1));
    }
  }
  const int n_nodes = static_cast<int>(dense.size());

  std::vector<double> f(n_nodes);
  double fmax = 0.0;
  for (int j = 0; j < n_nodes; ++j) {
    f[j] = (dense[j] - I).determinant();
    fmax = std::max(fmax, std::abs(f[j]));
  }
  if (fmax == 0.0) return std::nullopt;  // identity path: hopeless
  const double tol_zero = 1e-8 * fmax;

  int near_zero = 0;
  for (double fj : f) {
    if (std::abs(fj) <= tol_zero) ++near_zero;
  }
  if (near_zero > n_nodes / 4) {
    return std::nullopt;  // the path hugs det(Psi - I) = 0
  }

  // Crossing form matrix. Autonomous generator paths get it exactly; raw
  // sample paths get a central-difference estimate whose asymmetry is the
  // trust check.
  const auto form_at = [&](int node) -> std::optional<Mat> {
    if (have_gen) return crossing_form_matrix(*path.generator, J);
    const int S = n_nodes;
    const double dt = 1.0 / (S - 1);
    Mat Best;
    if (node == 0) {
      // One-sided stencils must be second order: the leading error of the
      // two-point form is antisymmetric and trips the trust check below.
      if (S >= 3) {
        Best = (-3.0 * dense[0] + 4.0 * dense[1] - dense[2]) / (2.0 * dt);
      } else {
        Best = (dense[1] - dense[0]) / dt;
      }
    } else if (node == S - 1) {
      if (S >= 3) {
        Best = (3.0 * dense[S - 1] - 4.0 * dense[S - 2] + dense[S - 3]) /
               (2.0 * dt) * dense[S - 1].inverse();
      } else {
        Best = (dense[S - 1] - dense[S - 2]) / dt * dense[S - 1].inverse();
      }
    } else {
      Best = (dense[node + 1] - dense[node - 1]) / (2.0 * dt) *
             dense[node].inverse();
    }
    const Mat JB = -(J * Best);
    const double asym = (JB - JB.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-6 * (1.0 + JB.cwiseAbs().maxCoeff())) return std::nullopt;
    return sym(JB);
  };

  const auto psi_at = [&](double t) -> Mat {
    return expm(t * (*path.generator));
  };

  // Walk the grid splitting it into above-tolerance stretches and zero runs.
  int total_twice = 0;

  // Endpoint t = 0: always a crossing (full kernel), half weight.
  {
    const auto S0 = form_at(0);
    if (!S0) return std::nullopt;
    Eigen::SelfAdjointEigenSolver<Mat> es(*S0, Eigen::EigenvaluesOnly);
    const Vec ev = es.eigenvalues();
    const double thr = 1e-10 * (1.0 + opnorm_sym(*S0));
    int pos = 0, neg = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      if (ev(i) > thr) ++pos;
      if (ev(i) < -thr) ++neg;
    }
    if (pos + neg < d) return std::nullopt;  // degenerate generator form
    total_twice += pos - neg;                // half weight: sgn/2, doubled
  }

  // Interior crossings. Find the first and last clearly nonzero nodes; the
  // leading run belongs to t = 0 and the trailing run to t = 1.
  int first_live = 0;
  while (first_live < n_nodes && std::abs(f[first_live]) <= tol_zero) {
    ++first_live;
  }
  int last_live = n_nodes - 1;
  while (last_live >= 0 && std::abs(f[last_live]) <= tol_zero) --last_live;
  if (first_live >= last_live) return std::nullopt;

  int i = first_live;
  while (i < last_live) {
    // Advance to the next sign change or zero run.
    if (std::abs(f[i + 1]) > tol_zero) {
      if (f[i] * f[i + 1] < 0.0) {
        // Transversal crossing between nodes i and i+1.
        double t_star;
        Mat Psi_star;
        if (have_gen) {
          double lo = tgrid[i], hi = tgrid[i + 1];
          double flo = f[i];
          for (int it = 0; it < 60 && hi - lo > 1e-12; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double fm = (psi_at(mid) - I).determinant();
            if (flo * fm <= 0.0) {
              hi = mid;
            } else {
              lo = mid;
              flo = fm;
            }
          }
          t_star = 0.5 * (lo + hi);
          Psi_star = psi_at(t_star);
        } else {
          // Without a generator the crossing is pinned to node resolution.
          const int node = std::abs(f[i]) < std::abs(f[i + 1]) ? i : i + 1;
          if (std::abs(f[node]) > tol_zero) return std::nullopt;
          t_star = tgrid[node];
          Psi_star = dense[node];
        }
        const auto Sf = form_at(i);
        if (!Sf) return std::nullopt;
        const CrossingData cd = evaluate_crossing(Psi_star, *Sf, t_star);
        if (!cd.ok) return std::nullopt;
        total_twice += 2 * cd.sgn;
      }
      ++i;
      continue;
    }

    // Zero run [a..b] strictly inside (first_live, last_live).
    const int a = i + 1;
    int b = a;
    while (b + 1 < n_nodes && std::abs(f[b + 1]) <= tol_zero) ++b;
    const int lo_node = a - 1, hi_node = b + 1;
    double t_star;
    Mat Psi_star;
    if (f[lo_node] * f[hi_node] < 0.0) {
      // Odd crossing hidden in the run.
      if (have_gen) {
        double lo = tgrid[lo_node], hi = tgrid[hi_node];
        double flo = f[lo_node];
        for (int it = 0; it < 60 && hi - lo > 1e-12; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double fm = (psi_at(mid) - I).determinant();
          if (flo * fm <= 0.0) {
            hi = mid;
          } else {
            lo = mid;
            flo = fm;
          }
        }
        t_star = 0.5 * (lo + hi);
        Psi_star = psi_at(t_star);
      } else {
        const int node = (a + b) / 2;
        t_star = tgrid[node];
        Psi_star = dense[node];
      }
    } else {
      // Even-order touch: minimize |f| inside the run's bracket.
      if (have_gen) {
        double lo = tgrid[lo_node], hi = tgrid[hi_node];
        for (int it = 0; it < 60; ++it) {
          const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
          const double f1 = std::abs((psi_at(m1) - I).determinant());
          const double f2 = std::abs((psi_at(m2) - I).determinant());
          if (f1 < f2) {
            hi = m2;
          } else {
            lo = m1;
          }
        }
        t_star = 0.5 * (lo + hi);
        Psi_star = psi_at(t_star);
      } else {
        const int node = (a + b) / 2;
        t_star = tgrid[node];
        Psi_star = dense[node];
      }
    }
    const auto Sf = form_at((a + b) / 2);
    if (!Sf) return std::nullopt;
    const CrossingData cd = evaluate_crossing(Psi_star, *Sf, t_star);
    if (!cd.ok) return std::nullopt;
    total_twice += 2 * cd.sgn;
    i = hi_node;
  }

  // Endpoint t = 1: half weight when the endpoint actually crosses.
  if (std::abs(f[n_nodes - 1]) <= tol_zero) {
    const auto Sf = form_at(n_nodes - 1);
    if (!Sf) return std::nullopt;
    const CrossingData cd =
        evaluate_crossing(dense[n_nodes - 1], *Sf, tgrid[n_nodes - 1]);
    if (!cd.ok) return std::nullopt;
    total_twice += cd.sgn;
  }

  return HalfInt::from_twice(total_twice);
}

std::optional<HalfInt> transverse_cz(const ClosedCharacteristic& orbit,
                                     const QuadraticHamiltonian& H) {
  if (H.dim() < 4) {
    throw ValidationError(
        "transverse_cz: no transverse directions in dimension 2");
  }
  Decomposition dec;
  try {
    dec = classify(H);
  } catch (const UnresolvedError&) {
    return std::nullopt;
  }
  if (!dec.semisimple || !dec.transform) return std::nullopt;

  // Locate the orbit's elliptic block and assemble the normal form of the
  // complementary blocks: in adapted coordinates the linearized return map
  // splits off the orbit plane, and its restriction to the symplectic
  // complement is generated by eta J0 A_rest.
  int match = -1;
  double best_gap = 0.0;
  for (std::size_t idx = 0; idx < dec.blocks.size(); ++idx) {
    const auto& b = dec.blocks[idx];
    if (b.kind != HormanderBlock::Kind::c || b.m != 1) continue;
    const double gap = std::abs(b.lambda1 - orbit.mu);
    if (match < 0 || gap < best_gap) {
      match = static_cast<int>(idx);
      best_gap = gap;
    }
  }
  if (match < 0 || best_gap > 1e-6 * (1.0 + orbit.mu)) return std::nullopt;

  std::vector<HormanderBlock> rest;
  for (std::size_t idx = 0; idx < dec.blocks.size(); ++idx) {
    if (static_cast<int>(idx) != match) rest.push_back(dec.blocks[idx]);
  }
  const Mat A_rest = assembled_normal_form(rest);
  const int n_rest = static_cast<int>(A_rest.rows()) / 2;
  const Mat B = orbit.eta * (standard_j0(n_rest) * A_rest);

  log::emit(log::Level::info,
            "transverse_cz: index computed in block-adapted coordinates; the "
            "additive normalization against a chosen contact trivialization "
            "is left open");
  return rs_index(SymplecticPath::from_generator(B));
}

HalfInt signature_index(int normal_dim, int morse_index) {
  return HalfInt::from_twice(normal_dim - 2 * morse_index);
}

HalfInt grading(HalfInt mu_sigma, HalfInt mu_cz) {
  return HalfInt::from_twice(mu_sigma.twice + mu_cz.twice + 1);
}

double moduli_dimension(HalfInt cz_minus, HalfInt cz_plus, int dim_minus,
                        int dim_plus) {
  return cz_plus.value() - cz_minus.value() + 0.5 * (dim_minus + dim_plus);
}

}  // namespace tentacle
