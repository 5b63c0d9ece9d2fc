#include "kuranishi/validators.hpp"

#include "kuranishi/differential.hpp"
#include "kuranishi/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

namespace kuranishi {

namespace {

using Q = std::vector<Rational>;
constexpr double kInf = std::numeric_limits<double>::infinity();

Q exact(const Vec& x) {
  Q q(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) q[i] = to_rational(x[i]);
  return q;
}

bool polynomial_change(const CoordinateChange& c) {
  for (const auto& b : c.branches())
    if (!b.phi.is_polynomial()) return false;
  return true;
}

int branch_exact(const CoordinateChange& c, const Q& q) {
  for (std::size_t b = 0; b < c.branches().size(); ++b)
    if (c.branches()[b].domain.contains_exact(q)) return static_cast<int>(b);
  return -1;
}

std::optional<Q> apply_exact(const CoordinateChange& c, const Q& q) {
  int b = branch_exact(c, q);
  if (b < 0) return std::nullopt;
  return c.branches()[b].phi.eval_exact(q);
}

double max_abs_diff(const Q& a, const Q& b) {
  Rational m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max<Rational>(m, abs(a[i] - b[i]));
  return m.get_d();
}

Q mat_vec(const RationalMatrix& A, const Q& x) {
  Q y(A.rows(), Rational(0));
  for (int r = 0; r < A.rows(); ++r)
    for (int c = 0; c < A.cols(); ++c) y[r] += A(r, c) * x[c];
  return y;
}

int rank_abs(const Mat& M, double thr) {
  if (M.rows() == 0 || M.cols() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(M);
  int r = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > thr) ++r;
  return r;
}

double largest_sv(const Mat& M) {
  if (M.rows() == 0 || M.cols() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(M);
  return svd.singularValues()[0];
}

Mat hcat(const Mat& A, const Mat& B) {
  Mat M(A.rows(), A.cols() + B.cols());
  if (A.cols()) M.leftCols(A.cols()) = A;
  if (B.cols()) M.rightCols(B.cols()) = B;
  return M;
}

std::uint64_t salt(std::uint64_t seed, const IndexSet& I, const IndexSet& J, std::uint64_t tag) {
  return hash_index_set(J, hash_index_set(I, seed ^ (tag * 0x9e3779b97f4a7c15ULL)));
}

std::vector<Vec> samples(const Domain& D, const CheckOptions& opt, std::uint64_t seed) {
  if (D.empty()) return {};
  return sample_domain(D, opt.density, seed);
}

std::vector<IndexSet> proper_supersets(const Atlas& a, const IndexSet& I) { return a.higher(I); }

Witness witness(std::vector<IndexSet> charts, std::vector<Vec> pts, std::vector<double> margins, std::string note) {
  return Witness{std::move(charts), std::move(pts), std::move(margins), std::move(note)};
}

}  // namespace

const char* cocycle_level_name(CocycleLevel l) {
  switch (l) {
    case CocycleLevel::Weak: return "weak";
    case CocycleLevel::Standard: return "standard";
    case CocycleLevel::Strong: return "strong";
  }
  return "?";
}

Verdict check_cocycle(const Atlas& atlas, CocycleLevel level, const CheckOptions& opt) {
  Verdict v;
  v.check = std::string("cocycle_") + cocycle_level_name(level);
  v.tolerance = opt.tol.eq;
  double worst = 0.0;
  bool all_exact = true;
  int triples = 0;
  for (const auto& K : atlas.index_sets)
    for (const auto& J : atlas.lower(K))
      for (const auto& I : atlas.lower(J)) {
        ++triples;
        const auto &ij = atlas.change(I, J), &jk = atlas.change(J, K), &ik = atlas.change(I, K);
        if (jk.hat_phi() * ij.hat_phi() != ik.hat_phi())
          v.fail(witness({I, J, K}, {}, {}, "hat_JK * hat_IJ != hat_IK"));
        const bool poly = polynomial_change(ij) && polynomial_change(jk) && polynomial_change(ik);
        all_exact = all_exact && poly;

        struct Probe {
          bool valid = false, inA = false, inB = false;
          double residual = 0.0;
        };
        auto pts = samples(ij.domain(), opt, salt(opt.seed, I, K, 1));
        auto probes = parallel_map<Probe>(pts.size(), [&](std::size_t i) {
          Probe p;
          const Vec& y = pts[i];
          if (poly) {
            Q q = exact(y);
            auto w = apply_exact(ij, q);
            if (!w) return p;
            p.valid = true;
            auto a = apply_exact(jk, *w);
            auto b = apply_exact(ik, q);
            p.inA = a.has_value();
            p.inB = b.has_value();
            if (a && b) p.residual = max_abs_diff(*a, *b);
          } else {
            auto w = ij.apply(y);
            if (!w) return p;
            p.valid = true;
            auto a = jk.apply(*w);
            auto b = ik.apply(y);
            p.inA = a.has_value();
            p.inB = b.has_value();
            if (a && b) p.residual = (*a - *b).lpNorm<Eigen::Infinity>();
          }
          return p;
        });
        bool weak_failed = false, std_failed = false;
        for (std::size_t i = 0; i < pts.size(); ++i) {
          const Probe& p = probes[i];
          if (!p.valid) continue;
          worst = std::max(worst, p.residual);
          if (p.residual > opt.tol.eq && !weak_failed) {
            weak_failed = true;
            v.fail(witness({I, J, K}, {pts[i]}, {p.residual}, "phi_JK o phi_IJ != phi_IK"));
          }
          if (level != CocycleLevel::Weak && p.inA && !p.inB && !std_failed) {
            std_failed = true;
            v.fail(witness({I, J, K}, {pts[i]}, {}, "phi_IJ^-1(U_JK) not contained in U_IK"));
          }
        }
        if (level == CocycleLevel::Strong) {
          auto back = samples(ik.domain(), opt, salt(opt.seed, I, K, 2));
          auto inA = parallel_map<char>(back.size(), [&](std::size_t i) -> char {
            const Vec& y = back[i];
            if (poly) {
              auto w = apply_exact(ij, exact(y));
              return w && branch_exact(jk, *w) >= 0;
            }
            auto w = ij.apply(y);
            return w && jk.contains(*w);
          });
          for (std::size_t i = 0; i < back.size(); ++i)
            if (!inA[i]) {
              v.fail(witness({I, J, K}, {back[i]}, {}, "U_IK not contained in phi_IJ^-1(U_JK)"));
              break;
            }
        }
      }
  v.observe(opt.tol.eq - worst);
  v.details["triples"] = triples;
  v.details["residual"] = number_json(worst);
  v.details["exact"] = all_exact;
  return v;
}

Verdict check_intertwining(const Atlas& atlas, const CheckOptions& opt) {
  Verdict v;
  v.check = "intertwining";
  v.tolerance = opt.tol.eq;
  double worst = 0.0;
  for (const auto& [key, ch] : atlas.changes) {
    const auto& [I, J] = key;
    const Chart &ci = atlas.chart(I), &cj = atlas.chart(J);
    const bool poly = polynomial_change(ch) && ci.section.is_polynomial() && cj.section.is_polynomial();
    auto pts = samples(ch.domain(), opt, salt(opt.seed, I, J, 3));
    auto res = parallel_map<double>(pts.size(), [&](std::size_t i) {
      if (poly) {
        Q q = exact(pts[i]);
        auto w = apply_exact(ch, q);
        if (!w) return 0.0;
        return max_abs_diff(cj.section.eval_exact(*w), mat_vec(ch.hat_phi(), ci.section.eval_exact(q)));
      }
      auto w = ch.apply(pts[i]);
      if (!w) return 0.0;
      return (cj.section.eval(*w) - ch.hat_phi_d() * ci.section.eval(pts[i])).lpNorm<Eigen::Infinity>();
    });
    for (std::size_t i = 0; i < pts.size(); ++i) {
      worst = std::max(worst, res[i]);
      if (res[i] > opt.tol.eq) {
        v.fail(witness({I, J}, {pts[i]}, {res[i]}, "s_J o phi != hat o s_I"));
        break;
      }
    }
  }
  v.observe(opt.tol.eq - worst);
  v.details["residual"] = number_json(worst);
  return v;
}

Verdict check_index_condition(const Atlas& atlas, const CheckOptions& opt) {
  Verdict v;
  v.check = "index_condition";
  v.tolerance = opt.tol.rank;
  std::size_t probed = 0;
  for (const auto& [key, ch] : atlas.changes) {
    const auto& [I, J] = key;
    const Chart &ci = atlas.chart(I), &cj = atlas.chart(J);
    if (ci.dim() - ci.obstruction_dim != cj.dim() - cj.obstruction_dim) {
      v.fail(witness({I, J}, {}, {}, "dim U - dim E differs"));
      continue;
    }
    if (ch.empty()) continue;
    const Domain dom = ch.domain();
    auto pts = samples(dom, opt, salt(opt.seed, I, J, 4));
    if (ci.obstruction_dim > 0) {
      auto z = locate_zeros(ci.section, dom, opt.density, salt(opt.seed, I, J, 5), opt.tol.id);
      pts.insert(pts.end(), z.begin(), z.end());
    }
    const Mat P = ch.hat_phi_d();
    const int mI = ci.obstruction_dim, mJ = cj.obstruction_dim, nI = ci.dim();
    const Mat QE = orthogonal_complement(P, opt.tol.rank);
    struct Probe {
      bool ok = true;
      double margin = kInf;
      std::string note;
    };
    auto probes = parallel_map<Probe>(pts.size(), [&](std::size_t i) {
      Probe p;
      const Vec& u = pts[i];
      int b = ch.branch_at(u);
      if (b < 0) {
        p.margin = kInf;
        return p;
      }
      const Vec w = ch.apply_branch(b, u);
      const Mat A = cj.section.jacobian(w);
      const Mat B = ci.section.jacobian(u);
      const Mat D = ch.jacobian_branch(b, u);
      const double scale = std::max({1.0, largest_sv(A), largest_sv(P), largest_sv(B)});
      const double thr = opt.tol.rank * scale;
      const int rAP = rank_abs(hcat(A, P), thr), rA = rank_abs(A, thr), rB = rank_abs(B, thr);
      const int rD = rank_abs(D, opt.tol.rank * std::max(1.0, largest_sv(D)));
      const Mat N = orthogonal_complement(D, opt.tol.rank);
      const Mat M = QE.transpose() * A * N;
      p.margin = min_singular_value(M);
      if (rD != nI) {
        p.ok = false;
        p.note = "dphi not injective (rank " + std::to_string(rD) + ")";
      } else if (rAP != mJ) {
        p.ok = false;
        p.note = "im ds_J + im hat has rank " + std::to_string(rAP) + " < " + std::to_string(mJ);
      } else if (rA + mI - mJ != rB) {
        p.ok = false;
        p.note = "im ds_J ∩ im hat has dim " + std::to_string(rA + mI - mJ) + ", hat(im ds_I) has dim " +
                 std::to_string(rB);
      }
      return p;
    });
    probed += pts.size();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (!probes[i].ok) {
        v.fail(witness({I, J}, {pts[i]}, {probes[i].margin}, probes[i].note));
        break;
      }
      v.observe(probes[i].margin);
    }
  }
  v.details["points"] = probed;
  return v;
}

Verdict check_additivity(const Atlas& atlas) {
  Verdict v;
  v.check = "additivity";
  for (const auto& I : atlas.index_sets) {
    if (I.size() < 2) continue;
    const Chart& c = atlas.chart(I);
    RationalMatrix block(c.obstruction_dim, 0);
    for (int i : I) block = block.hconcat(atlas.change({i}, I).hat_phi());
    const int r = block.rank();
    if (block.cols() != c.obstruction_dim || r != c.obstruction_dim) {
      std::ostringstream os;
      os << "E_I has dim " << c.obstruction_dim << ", basic images span " << r << " of " << block.cols() << " columns";
      v.fail(witness({I}, {}, {static_cast<double>(r)}, os.str()));
    }
  }
  return v;
}

Verdict check_filtration(const Atlas& atlas) {
  Verdict v;
  v.check = "filtration";
  int pairs = 0;
  for (const auto& J : atlas.index_sets) {
    auto low = atlas.lower(J);
    const int mJ = atlas.chart(J).obstruction_dim;
    for (std::size_t a = 0; a < low.size(); ++a)
      for (std::size_t b = a + 1; b < low.size(); ++b) {
        const IndexSet &I = low[a], &H = low[b];
        IndexSet IH = set_intersection(I, H);
        RationalMatrix C(mJ, 0);
        if (!IH.empty()) {
          if (!atlas.has_chart(IH)) continue;
          C = atlas.change(IH, J).hat_phi();
        }
        ++pairs;
        if (!is_intersection(atlas.change(I, J).hat_phi(), atlas.change(H, J).hat_phi(), C))
          v.fail(witness({I, H, J}, {}, {}, "im hat_IJ ∩ im hat_HJ != im hat_{I∩H,J}"));
      }
  }
  v.details["pairs"] = pairs;
  return v;
}

namespace {

// U_IJ, with U_II = U_I and U_IL = ∅ for L outside the poset.
struct TransitionDomain {
  const Atlas& atlas;
  bool contains(const IndexSet& I, const IndexSet& L, const Q& q) const {
    if (I == L) return atlas.chart(I).domain.contains_exact(q);
    if (!atlas.has_change(I, L)) return false;
    return branch_exact(atlas.change(I, L), q) >= 0;
  }
  bool contains(const IndexSet& I, const IndexSet& L, const Vec& x) const {
    if (I == L) return atlas.chart(I).domain.contains(x);
    if (!atlas.has_change(I, L)) return false;
    return atlas.change(I, L).contains(x);
  }
  Domain domain(const IndexSet& I, const IndexSet& L) const {
    if (I == L) return atlas.chart(I).domain;
    if (!atlas.has_change(I, L)) return Domain(atlas.chart(I).dim());
    return atlas.change(I, L).domain();
  }
};

void tame1(const Atlas& atlas, const CheckOptions& opt, Verdict& v) {
  TransitionDomain T{atlas};
  for (const auto& I : atlas.index_sets) {
    auto up = proper_supersets(atlas, I);
    if (up.size() < 2) continue;
    auto pts = samples(atlas.chart(I).domain, opt, salt(opt.seed, I, I, 6));
    std::vector<Q> qs(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) qs[i] = exact(pts[i]);
    for (std::size_t a = 0; a < up.size(); ++a)
      for (std::size_t b = a + 1; b < up.size(); ++b) {
        const IndexSet &J = up[a], &K = up[b];
        const IndexSet L = set_union(J, K);
        auto bad = parallel_map<char>(pts.size(), [&](std::size_t i) -> char {
          const bool lhs = T.contains(I, J, qs[i]) && T.contains(I, K, qs[i]);
          return lhs != T.contains(I, L, qs[i]);
        });
        for (std::size_t i = 0; i < pts.size(); ++i)
          if (bad[i]) {
            v.fail(witness({I, J, K}, {pts[i]}, {},
                           "U_IJ ∩ U_IK != U_I" + to_string(L) + (atlas.has_chart(L) ? "" : " (empty: not in poset)")));
            break;
          }
      }
  }
}

// Projection of w onto s_J^{-1}(im hat) by Gauss-Newton on the complement components.
std::optional<Vec> project_to_preimage(const Chart& cj, const Mat& Qc, const Vec& w) {
  if (Qc.cols() == 0) return w;
  VecFn F = [&](const Vec& x) -> Vec { return Qc.transpose() * cj.section.eval(x); };
  MatFn Jf = [&](const Vec& x) -> Mat { return Qc.transpose() * cj.section.jacobian(x); };
  NewtonOptions no;
  no.max_step = 0.05;
  auto r = newton_solve(F, Jf, w, no);
  if (!r.converged) return std::nullopt;
  return r.x;
}

void tame2(const Atlas& atlas, const CheckOptions& opt, Verdict& v) {
  TransitionDomain T{atlas};
  for (const auto& [key, ij] : atlas.changes) {
    const auto& [I, J] = key;
    const Chart& cj = atlas.chart(J);
    const RationalMatrix& hat = ij.hat_phi();
    const Mat Qc = orthogonal_complement(ij.hat_phi_d(), opt.tol.rank);
    std::vector<IndexSet> Ks{J};
    for (const auto& K : atlas.higher(J)) Ks.push_back(K);
    const bool poly = polynomial_change(ij) && cj.section.is_polynomial();
    for (const auto& K : Ks) {
      // forward: phi_IJ(U_IK) ⊆ U_JK ∩ s_J^{-1}(E_I)
      auto fw = samples(T.domain(I, K), opt, salt(opt.seed, I, K, 7));
      auto fbad = parallel_map<int>(fw.size(), [&](std::size_t i) -> int {
        if (poly && (K == J || polynomial_change(atlas.change(J, K)))) {
          Q q = exact(fw[i]);
          auto w = apply_exact(ij, q);
          if (!w) return 1;
          if (!T.contains(J, K, *w)) return 2;
          RationalMatrix col(hat.rows(), 1);
          Q s = cj.section.eval_exact(*w);
          for (int r = 0; r < hat.rows(); ++r) col(r, 0) = s[r];
          return hat.hconcat(col).rank() == hat.cols() ? 0 : 3;
        }
        auto w = ij.apply(fw[i]);
        if (!w) return 1;
        if (!T.contains(J, K, *w)) return 2;
        return (Qc.transpose() * cj.section.eval(*w)).norm() > opt.tol.eq ? 3 : 0;
      });
      static const char* fnotes[] = {"", "U_IK point outside U_IJ", "phi_IJ(U_IK) leaves U_JK",
                                     "s_J(phi_IJ(U_IK)) leaves im hat_IJ"};
      for (std::size_t i = 0; i < fw.size(); ++i)
        if (fbad[i]) {
          v.fail(witness({I, J, K}, {fw[i]}, {}, fnotes[fbad[i]]));
          break;
        }
      // backward: U_JK ∩ s_J^{-1}(E_I) ⊆ phi_IJ(U_IK)
      auto bw = samples(T.domain(J, K), opt, salt(opt.seed, J, K, 8));
      const Domain& UJ = cj.domain;
      struct Back {
        bool probed = false, bad = false;
        Vec w;
      };
      auto bres = parallel_map<Back>(bw.size(), [&](std::size_t i) {
        Back b;
        auto w = project_to_preimage(cj, Qc, bw[i]);
        if (!w || !T.contains(J, K, *w) || UJ.inner_depth(*w) < opt.tol.id) return b;
        if (K != J && atlas.change(J, K).domain().inner_depth(*w) < opt.tol.id) return b;
        b.probed = true;
        b.w = *w;
        auto y = ij.invert(*w, opt.tol.id);
        b.bad = !y || !T.contains(I, K, *y);
        return b;
      });
      for (std::size_t i = 0; i < bw.size(); ++i)
        if (bres[i].bad) {
          v.fail(witness({I, J, K}, {bres[i].w}, {}, "U_JK ∩ s_J^-1(E_I) point outside phi_IJ(U_IK)"));
          break;
        }
    }
  }
}

// dim(im dphi_IJ ∩ im dphi_HJ) = dim U_{I∩H} at points of the intersection of the images.
void phitrans(const Atlas& atlas, const CheckOptions& opt, Verdict& v) {
  for (const auto& J : atlas.index_sets) {
    auto low = atlas.lower(J);
    for (std::size_t a = 0; a < low.size(); ++a)
      for (std::size_t b = 0; b < low.size(); ++b) {
        if (a == b) continue;
        const IndexSet &I = low[a], &H = low[b];
        if (is_subset(I, H) || is_subset(H, I)) continue;
        const IndexSet IH = set_intersection(I, H);
        if (!IH.empty() && !atlas.has_chart(IH)) continue;
        const int expect = atlas.dimension + (IH.empty() ? 0 : atlas.chart(IH).obstruction_dim);
        const auto &ij = atlas.change(I, J), &hj = atlas.change(H, J);
        if (ij.empty() || hj.empty()) continue;
        const Chart& ci = atlas.chart(I);
        auto zs = ci.obstruction_dim > 0
                      ? locate_zeros(ci.section, ij.domain(), std::max(4, opt.density / 2), salt(opt.seed, I, J, 9),
                                     opt.tol.id)
                      : samples(ij.domain(), opt, salt(opt.seed, I, J, 9));
        auto res = parallel_map<int>(zs.size(), [&](std::size_t i) -> int {
          int bi = ij.branch_at(zs[i]);
          if (bi < 0) return -1;
          Vec w = ij.apply_branch(bi, zs[i]);
          auto y = hj.invert(w, opt.tol.id);
          if (!y) return -1;
          int bh = hj.branch_at(*y);
          if (bh < 0) return -1;
          Mat Di = ij.jacobian_branch(bi, zs[i]), Dh = hj.jacobian_branch(bh, *y);
          const double thr = opt.tol.rank * std::max({1.0, largest_sv(Di), largest_sv(Dh)});
          return rank_abs(Di, thr) + rank_abs(Dh, thr) - rank_abs(hcat(Di, Dh), thr);
        });
        for (std::size_t i = 0; i < zs.size(); ++i)
          if (res[i] >= 0 && res[i] != expect) {
            v.fail(witness({I, H, J}, {zs[i]}, {static_cast<double>(res[i])},
                           "images of dphi meet in dim " + std::to_string(res[i]) + ", expected " +
                               std::to_string(expect)));
            break;
          }
      }
  }
}

}  // namespace

Verdict check_tameness(const Atlas& atlas, const CheckOptions& opt) {
  Verdict add = check_additivity(atlas);
  Verdict v;
  v.check = "tameness";
  v.tolerance = opt.tol.id;
  if (!add.passed()) {
    for (auto w : add.witnesses) {
      w.note = "not additive: " + w.note;
      v.fail(std::move(w));
    }
    return v;
  }
  Verdict t1, t2, pt, fl = check_filtration(atlas);
  tame1(atlas, opt, t1);
  tame2(atlas, opt, t2);
  phitrans(atlas, opt, pt);
  v.details["tame1"] = status_name(t1.status);
  v.details["tame2"] = status_name(t2.status);
  v.details["filtration"] = status_name(fl.status);
  v.details["transversality"] = status_name(pt.status);
  for (const Verdict* p : {&t1, &t2, &fl, &pt})
    for (const auto& w : p->witnesses) v.fail(w);
  return v;
}

Verdict check_injectivity_hausdorff(const Atlas& atlas, const RealizationCloud& cloud, const CheckOptions& opt) {
  Verdict v;
  v.check = "injectivity_hausdorff";
  v.tolerance = opt.tol.id;
  v.details["density"] = cloud.density;
  int charts_failed = 0;
  for (const auto& I : atlas.index_sets) {
    auto it = cloud.by_chart.find(I);
    if (it == cloud.by_chart.end()) continue;
    std::map<std::size_t, std::size_t> first;  // class -> first member in chart I
    for (std::size_t p : it->second) {
      auto [f, inserted] = first.emplace(cloud.cls[p], p);
      if (inserted) continue;
      const double d = chart_distance(atlas, I, cloud.points[f->second].x, cloud.points[p].x);
      if (d > opt.tol.id) {
        v.fail(witness({I, I}, {cloud.points[f->second].x, cloud.points[p].x}, {d},
                       "distinct points of U_" + to_string(I) + " have the same image in |K|"));
        ++charts_failed;
        break;
      }
    }
  }
  v.details["injective"] = charts_failed == 0;
  if (atlas.dimension != 0) {
    v.details["hausdorff"] = "skipped: zero set has positive dimension";
    return v;
  }
  try {
    auto zs = zero_set_X(atlas, cloud, true, opt.tol);
    double sep = kInf;
    for (std::size_t a = 0; a < zs.size(); ++a)
      for (std::size_t b = a + 1; b < zs.size(); ++b) {
        const double d = class_distance(atlas, cloud, zs[a].id, zs[b].id);
        sep = std::min(sep, d);
        if (d <= opt.tol.id)
          v.fail(witness({zs[a].top, zs[b].top}, {}, {d}, "distinct zero classes are not separated"));
      }
    v.details["hausdorff"] = "no violation at density " + std::to_string(cloud.density);
    v.details["zero_classes"] = zs.size();
    v.details["separation"] = number_json(sep);
    if (std::isfinite(sep)) v.observe(sep);
  } catch (const AtlasError& e) {
    if (v.status == Status::Pass) v.status = Status::Undetermined;
    v.details["hausdorff"] = std::string("undetermined: ") + e.what();
  }
  return v;
}

namespace {

Mat metric_tensor(const Atlas& atlas, const IndexSet& I, const Vec& x) {
  const Chart& c = atlas.chart(I);
  if (c.metric.kind == MetricKind::Pullback) {
    const auto& ch = atlas.change(I, c.metric.target);
    int b = ch.branch_at(x);
    if (b >= 0) {
      Mat D = ch.jacobian_branch(b, x);
      return D.transpose() * D;
    }
  }
  return Mat::Identity(c.dim(), c.dim());
}

}  // namespace

Verdict check_metric_admissibility(const Atlas& atlas, const CheckOptions& opt) {
  Verdict v;
  v.check = "metric_admissibility";
  v.tolerance = opt.tol.eq;
  double worst = 0.0, stretch = 1.0;
  for (const auto& [key, ch] : atlas.changes) {
    const auto& [I, J] = key;
    auto pts = samples(ch.domain(), opt, salt(opt.seed, I, J, 10));
    struct Probe {
      double defect = 0.0, stretch = 1.0, dist = 0.0;
    };
    auto probes = parallel_map<Probe>(pts.size(), [&](std::size_t i) {
      Probe p;
      const Vec& x = pts[i];
      int b = ch.branch_at(x);
      if (b < 0) return p;
      Mat D = ch.jacobian_branch(b, x);
      Vec w = ch.apply_branch(b, x);
      Mat GI = metric_tensor(atlas, I, x), GJ = metric_tensor(atlas, J, w);
      Mat pulled = D.transpose() * GJ * D;
      p.defect = (pulled - GI).lpNorm<Eigen::Infinity>();
      if (GI.rows() > 0) {
        Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(pulled, GI);
        const auto& ev = es.eigenvalues();
        p.stretch = std::sqrt(std::max(ev.maxCoeff(), 1.0 / std::max(ev.minCoeff(), 1e-300)));
      }
      // distances across the identification, paired with the next sample
      const Vec& x2 = pts[(i + 1) % pts.size()];
      int b2 = ch.branch_at(x2);
      if (b2 == b && b >= 0) {
        const double dI = chart_distance(atlas, I, x, x2);
        const double dJ = chart_distance(atlas, J, w, ch.apply_branch(b2, x2));
        p.dist = std::abs(dI - dJ) / (1.0 + dI);
      }
      return p;
    });
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Probe& p = probes[i];
      worst = std::max(worst, p.defect);
      stretch = std::max(stretch, p.stretch);
      if (p.defect > opt.tol.eq) {
        v.fail(witness({I, J}, {pts[i]}, {p.stretch}, "phi_IJ is not an isometry; stretch " + std::to_string(p.stretch)));
        break;
      }
      if (p.dist > opt.tol.eq) {
        v.fail(witness({I, J}, {pts[i]}, {p.dist}, "chart distances differ across the identification"));
        break;
      }
    }
  }
  // symmetry and triangle probes on chart samples
  for (const auto& I : atlas.index_sets) {
    auto pts = samples(atlas.chart(I).domain, opt, salt(opt.seed, I, I, 11));
    const std::size_t n = std::min<std::size_t>(pts.size(), 64);
    for (std::size_t i = 0; i + 2 < n; ++i) {
      const Vec &a = pts[i], &b = pts[i + 1], &c = pts[i + 2];
      const double ab = chart_distance(atlas, I, a, b), ba = chart_distance(atlas, I, b, a);
      const double bc = chart_distance(atlas, I, b, c), ac = chart_distance(atlas, I, a, c);
      if (std::abs(ab - ba) > opt.tol.eq || ac > ab + bc + opt.tol.eq) {
        v.fail(witness({I}, {a, b, c}, {ab, bc, ac}, "chart distance is not a metric"));
        break;
      }
    }
  }
  v.observe(opt.tol.eq - worst);
  v.details["defect"] = number_json(worst);
  v.details["stretch"] = number_json(stretch);
  return v;
}

Verdict check_sum_conditions(const Atlas& atlas, const CheckOptions& opt) {
  Verdict v;
  v.check = "sum_conditions";
  v.tolerance = opt.tol.rank;
  for (const auto& I : atlas.index_sets) {
    if (I.size() < 2) continue;
    const Chart& c = atlas.chart(I);
    RationalMatrix block(c.obstruction_dim, 0);
    int total = 0;
    for (int i : I) {
      block = block.hconcat(atlas.change({i}, I).hat_phi());
      total += atlas.chart({i}).obstruction_dim;
    }
    if (block.rank() != total) {
      v.fail(witness({I}, {}, {static_cast<double>(block.rank())}, "basic obstruction images are not in direct sum"));
      continue;
    }
    if (c.obstruction_dim == 0) continue;
    const Mat Bd = block.to_double();
    auto zs = locate_zeros(c.section, c.domain, opt.density, salt(opt.seed, I, I, 12), opt.tol.id);
    auto ranks = parallel_map<double>(zs.size(), [&](std::size_t i) {
      return min_singular_value(hcat(c.section.jacobian(zs[i]), Bd).transpose());
    });
    for (std::size_t i = 0; i < zs.size(); ++i) {
      if (ranks[i] <= opt.tol.rank) {
        v.fail(witness({I}, {zs[i]}, {ranks[i]}, "im ds_I + sum of basic images is not E_I"));
        break;
      }
      v.observe(ranks[i]);
    }
  }
  return v;
}

std::vector<Verdict> validate_atlas(const Atlas& atlas, const CheckOptions& opt) {
  std::vector<Verdict> out;
  CocycleLevel level = CocycleLevel::Weak;
  if (atlas.kind == DeclaredKind::Standard) level = CocycleLevel::Standard;
  if (atlas.kind == DeclaredKind::Strong || atlas.kind == DeclaredKind::Tame) level = CocycleLevel::Strong;
  out.push_back(check_cocycle(atlas, level, opt));
  out.push_back(check_intertwining(atlas, opt));
  out.push_back(check_index_condition(atlas, opt));
  CloudOptions co;
  co.density = opt.density;
  co.seed = opt.seed;
  co.tol = opt.tol;
  out.push_back(check_injectivity_hausdorff(atlas, build_cloud(atlas, co), opt));
  out.push_back(check_additivity(atlas));
  out.push_back(check_filtration(atlas));
  out.push_back(check_sum_conditions(atlas, opt));
  out.push_back(check_metric_admissibility(atlas, opt));
  if (atlas.kind == DeclaredKind::Tame) out.push_back(check_tameness(atlas, opt));
  return out;
}

}  // namespace kuranishi
