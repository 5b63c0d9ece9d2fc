#include "kuranishi/generator.hpp"

#include "kuranishi/differential.hpp"
#include "kuranishi/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>

namespace kuranishi {

namespace {

// Nearest rational with denominator <= max_den, if it reproduces x to 1e-13.
Rational snap(double x, long max_den = 1000000) {
  if (x == 0.0) return Rational(0);
  double a = std::fabs(x);
  long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double r = a;
  for (int it = 0; it < 40; ++it) {
    double f = std::floor(r);
    if (f > 1e12) break;
    long ai = static_cast<long>(f);
    long h2 = ai * h1 + h0, k2 = ai * k1 + k0;
    if (k2 > max_den) break;
    h0 = h1, h1 = h2, k0 = k1, k1 = k2;
    if (std::fabs(static_cast<double>(h1) / static_cast<double>(k1) - a) <= 1e-13 * std::max(1.0, a)) {
      Rational q(h1, k1);
      q.canonicalize();
      return x < 0 ? Rational(-q) : q;
    }
    double rem = r - f;
    if (rem < 1e-15) break;
    r = 1.0 / rem;
  }
  return to_rational(x);
}

Box snapped_box(const Vec& c, double radius) {
  std::vector<Rational> lo, hi;
  Rational r = snap(radius);
  for (int k = 0; k < c.size(); ++k) {
    Rational ck = snap(c[k]);
    lo.push_back(ck - r);
    hi.push_back(ck + r);
  }
  return Box(lo, hi);
}

int permutation_sign(std::vector<int> p) {
  int s = 1;
  for (std::size_t i = 0; i < p.size(); ++i)
    while (p[i] != static_cast<int>(i)) {
      std::swap(p[i], p[static_cast<std::size_t>(p[i])]);
      s = -s;
    }
  return s;
}

std::vector<Polynomial::Exponents> monomials(int k, int degree) {
  std::vector<Polynomial::Exponents> out;
  Polynomial::Exponents e(static_cast<std::size_t>(k), 0);
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == k) {
      out.push_back(e);
      return;
    }
    for (int d = 0; d <= left; ++d) {
      e[static_cast<std::size_t>(pos)] = d;
      rec(pos + 1, left - d);
    }
    e[static_cast<std::size_t>(pos)] = 0;
  };
  rec(0, degree);
  return out;
}

double monomial_value(const Polynomial::Exponents& e, const Vec& u) {
  double v = 1.0;
  for (std::size_t i = 0; i < e.size(); ++i) v *= std::pow(u[static_cast<Eigen::Index>(i)], e[i]);
  return v;
}

Vec eval_embedding(const std::vector<Polynomial>& emb, const Vec& u) {
  Vec x(static_cast<Eigen::Index>(emb.size()));
  for (std::size_t i = 0; i < emb.size(); ++i) x[static_cast<Eigen::Index>(i)] = emb[i].eval(u);
  return x;
}

struct Reduction {
  RationalMatrix Q;
  SmoothMap G;
  std::vector<int> solved, free;
};

Reduction reduction_data(const GlobalProblem& p, const ChartSpec& spec, const GeneratorTolerances& tol) {
  const int n = p.n(), m = p.m(), e = spec.E.cols();
  if (spec.E.rows() != m) throw AtlasError(AtlasError::Kind::Dimension, "obstruction basis has wrong row count");
  if (spec.E.rank() != e) throw AtlasError(AtlasError::Kind::Rank, "obstruction basis is not independent");
  if (spec.center.size() != n) throw AtlasError(AtlasError::Kind::Dimension, "center has wrong dimension");
  Reduction r;
  r.Q = e == 0 ? RationalMatrix::identity(m) : spec.E.annihilator();
  const int rows = r.Q.rows();
  r.G = rows == 0 ? SmoothMap(n, 0) : p.F.left_multiply(r.Q);
  Mat dF = p.F.jacobian(spec.center);
  Mat full(m, n + e);
  full << dF, spec.E.to_double();
  if (numerical_rank(full, tol.rank) < m)
    throw AtlasError(AtlasError::Kind::Rank,
                     "im dF + E is not the whole target at chart " + to_string(spec.index));
  if (rows > 0) {
    Mat dG = r.Q.to_double() * dF;
    Eigen::ColPivHouseholderQR<Mat> qr(dG);
    const auto& perm = qr.colsPermutation().indices();
    for (int i = 0; i < rows; ++i) r.solved.push_back(perm[i]);
  }
  std::sort(r.solved.begin(), r.solved.end());
  for (int i = 0; i < n; ++i)
    if (!std::binary_search(r.solved.begin(), r.solved.end(), i)) r.free.push_back(i);
  return r;
}

}  // namespace

GlobalProblem GlobalProblem::from_json(const Json& j) {
  GlobalProblem p;
  p.name = j.value("name", std::string("problem"));
  const Json& reg = j.at("region");
  std::vector<Rational> lo, hi;
  for (const auto& iv : reg) {
    lo.push_back(json_rational(iv.at(0)));
    hi.push_back(json_rational(iv.at(1)));
  }
  const int n = j.value("ambient_dim", static_cast<int>(lo.size()));
  if (n != static_cast<int>(lo.size()))
    throw AtlasError(AtlasError::Kind::Schema, "region has " + std::to_string(lo.size()) + " intervals, ambient_dim " +
                                                   std::to_string(n));
  p.F = SmoothMap::parse(j.at("section").get<std::vector<std::string>>(), n);
  p.region = Box(lo, hi);
  if (p.region.empty()) throw AtlasError(AtlasError::Kind::Schema, "empty region");
  return p;
}

Json GlobalProblem::to_json() const {
  Json j;
  j["name"] = name;
  j["ambient_dim"] = n();
  j["section"] = F.to_strings();
  Json reg = Json::array();
  for (int k = 0; k < region.dim(); ++k) reg.push_back({rational_json(region.lo[k]), rational_json(region.hi[k])});
  j["region"] = reg;
  return j;
}

double boundary_margin(const GlobalProblem& p, int density) {
  const int n = p.n();
  const int N = std::max(1, density);
  double best = std::numeric_limits<double>::infinity();
  // node grid (endpoints included) on every face
  for (int i = 0; i < n; ++i)
    for (int side = 0; side < 2; ++side) {
      std::vector<int> idx(static_cast<std::size_t>(n), 0);
      while (true) {
        Vec x(n);
        for (int k = 0; k < n; ++k)
          x[k] = k == i ? (side ? p.region.hi_d[i] : p.region.lo_d[i])
                        : p.region.lo_d[k] + (p.region.hi_d[k] - p.region.lo_d[k]) * idx[static_cast<std::size_t>(k)] / N;
        best = std::min(best, p.F.eval(x).norm());
        int k = 0;
        for (; k < n; ++k) {
          if (k == i) continue;
          if (++idx[static_cast<std::size_t>(k)] <= N) break;
          idx[static_cast<std::size_t>(k)] = 0;
        }
        if (k == n) break;
      }
    }
  return best;
}

ReducedChart reduce_chart(const GlobalProblem& p, const ChartSpec& spec, const GeneratorTolerances& tol) {
  Reduction red = reduction_data(p, spec, tol);
  const int n = p.n(), k = static_cast<int>(red.free.size()), r = static_cast<int>(red.solved.size());
  const int e = spec.E.cols();

  ReducedChart out;
  out.E = spec.E;
  out.free = red.free;
  out.center = spec.center;

  Vec ucenter(k);
  for (int i = 0; i < k; ++i) ucenter[i] = spec.center[red.free[static_cast<std::size_t>(i)]];
  Box box = k > 0 ? snapped_box(ucenter, spec.radius) : Box();

  // solved coordinates at parameter u by Newton from the center
  auto solve = [&](const Vec& u) -> Vec {
    Vec x = spec.center;
    for (int i = 0; i < k; ++i) x[red.free[static_cast<std::size_t>(i)]] = u[i];
    if (r == 0) return x;
    Vec z0(r);
    for (int i = 0; i < r; ++i) z0[i] = spec.center[red.solved[static_cast<std::size_t>(i)]];
    auto lift = [&](const Vec& z) {
      Vec y = x;
      for (int i = 0; i < r; ++i) y[red.solved[static_cast<std::size_t>(i)]] = z[i];
      return y;
    };
    NewtonOptions no;
    no.residual_tol = 1e-14;
    auto res = newton_solve([&](const Vec& z) { return red.G.eval(lift(z)); },
                            [&](const Vec& z) {
                              Mat J = red.G.jacobian(lift(z));
                              Mat S(J.rows(), r);
                              for (int i = 0; i < r; ++i) S.col(i) = J.col(red.solved[static_cast<std::size_t>(i)]);
                              return S;
                            },
                            z0, no);
    if (!res.converged || res.residual > 1e-12)
      throw AtlasError(AtlasError::Kind::Rank, "implicit solve failed in chart " + to_string(spec.index));
    return lift(res.x);
  };

  std::vector<Polynomial> emb(static_cast<std::size_t>(n));
  for (int i = 0; i < k; ++i) emb[static_cast<std::size_t>(red.free[static_cast<std::size_t>(i)])] = Polynomial::variable(k, i);

  if (r > 0) {
    bool fitted = false;
    for (int D = 0; D <= tol.max_degree && !fitted; ++D) {
      auto mons = monomials(k, D);
      std::vector<Vec> fit_pts = k > 0 ? sample_box(box, D + 4, 1, 0.0) : std::vector<Vec>{Vec(0)};
      std::vector<Vec> chk_pts = k > 0 ? sample_box(box, D + 6, 2, 0.3) : std::vector<Vec>{Vec(0)};
      auto xs = parallel_map<Vec>(fit_pts.size(), [&](std::size_t i) { return solve(fit_pts[i]); });
      auto xc = parallel_map<Vec>(chk_pts.size(), [&](std::size_t i) { return solve(chk_pts[i]); });
      Mat V(static_cast<Eigen::Index>(fit_pts.size()), static_cast<Eigen::Index>(mons.size()));
      for (std::size_t a = 0; a < fit_pts.size(); ++a)
        for (std::size_t b = 0; b < mons.size(); ++b)
          V(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = monomial_value(mons[b], fit_pts[a]);
      Eigen::ColPivHouseholderQR<Mat> qr(V);
      std::vector<Polynomial> trial = emb;
      for (int s = 0; s < r; ++s) {
        const int c = red.solved[static_cast<std::size_t>(s)];
        Vec rhs(static_cast<Eigen::Index>(fit_pts.size()));
        for (std::size_t a = 0; a < fit_pts.size(); ++a) rhs[static_cast<Eigen::Index>(a)] = xs[a][c];
        Vec coef = qr.solve(rhs);
        Polynomial::TermMap terms;
        for (std::size_t b = 0; b < mons.size(); ++b) {
          Rational q = snap(coef[static_cast<Eigen::Index>(b)]);
          if (q != 0) terms[mons[b]] = q;
        }
        trial[static_cast<std::size_t>(c)] = Polynomial(k, terms);
      }
      double worst = 0.0;
      for (std::size_t a = 0; a < chk_pts.size(); ++a)
        for (int c : red.solved)
          worst = std::max(worst, std::fabs(trial[static_cast<std::size_t>(c)].eval(chk_pts[a]) - xc[a][c]));
      if (worst < tol.fit) {
        emb = std::move(trial);
        out.fit_residual = worst;
        fitted = true;
      }
    }
    if (!fitted)
      throw AtlasError(AtlasError::Kind::Other,
                       "no polynomial fit within tolerance for chart " + to_string(spec.index));
  }
  out.embedding = emb;

  SmoothMap x_of_u(k, emb);
  SmoothMap section = e == 0 ? SmoothMap(k, 0) : p.F.compose(x_of_u).left_multiply(spec.E.left_inverse());
  out.chart = Chart{spec.index, k > 0 ? Domain::box(box) : Domain::point(), e, section, {}};

  // ambient orientation transported: sign det[dx/du | e_P] * sign det[E | dF e_P]
  std::vector<int> order = red.free;
  order.insert(order.end(), red.solved.begin(), red.solved.end());
  Vec xc = eval_embedding(emb, ucenter);
  Mat dF = p.F.jacobian(xc);
  Mat M(p.m(), p.m());
  M.leftCols(e) = spec.E.to_double();
  for (int i = 0; i < r; ++i) M.col(e + i) = dF.col(red.solved[static_cast<std::size_t>(i)]);
  double det = p.m() == 0 ? 1.0 : M.determinant();
  if (det == 0.0) throw AtlasError(AtlasError::Kind::Rank, "degenerate orientation at chart " + to_string(spec.index));
  out.orientation = permutation_sign(order) * (det > 0 ? 1 : -1);
  return out;
}

std::vector<ReducedChart> reduce_global(const GlobalProblem& p, const std::vector<ChartSpec>& specs,
                                        const GeneratorTolerances& tol) {
  std::vector<ReducedChart> out;
  out.reserve(specs.size());
  for (const auto& s : specs) out.push_back(reduce_chart(p, s, tol));
  return out;
}

CoordinateChange inclusion_change(const ReducedChart& from, const ReducedChart& to) {
  const int kf = from.chart.dim(), kt = to.chart.dim();
  std::vector<Polynomial> comps;
  for (int c : to.free) comps.push_back(from.embedding[static_cast<std::size_t>(c)]);
  SmoothMap phi(kf, comps);

  RationalMatrix hat = to.E.cols() == 0 ? RationalMatrix(0, from.E.cols()) : to.E.left_inverse() * from.E;
  if (to.E * hat != from.E)
    throw AtlasError(AtlasError::Kind::Rank,
                     "obstruction space of " + to_string(from.chart.index) + " is not inside that of " +
                         to_string(to.chart.index));

  Domain dom(kf);
  if (kf == 0) {
    if (to.chart.domain.contains(phi.eval(Vec(0)))) dom = Domain::point();
  } else {
    dom = from.chart.domain.pullback_within(phi, to.chart.domain);
  }
  // both charts parametrize the same solution set, so x_to(phi(u)) = x_from(u)
  for (const auto& u : sample_domain(dom, 6, 3)) {
    Vec a = eval_embedding(from.embedding, u), b = eval_embedding(to.embedding, phi.eval(u));
    if ((a - b).lpNorm<Eigen::Infinity>() > 1e-7)
      throw AtlasError(AtlasError::Kind::Other,
                       "charts " + to_string(from.chart.index) + " and " + to_string(to.chart.index) +
                           " disagree on their overlap");
  }
  std::vector<ChangeBranch> branches;
  if (!dom.empty()) branches.push_back({dom, phi});
  return CoordinateChange(from.chart.index, to.chart.index, std::move(branches), hat, kf, kt);
}

SumChart sum_chart(const GlobalProblem& p, const std::vector<const ReducedChart*>& summands, const Vec& center,
                   double radius, const GeneratorTolerances& tol) {
  if (summands.empty()) throw AtlasError(AtlasError::Kind::Schema, "sum chart without summands");
  IndexSet idx;
  RationalMatrix E(p.m(), 0);
  int total = 0;
  for (const auto* s : summands) {
    idx = set_union(idx, s->chart.index);
    E = E.hconcat(s->E);
    total += s->E.cols();
  }
  const int rank = E.rank();
  if (rank != total)
    throw AtlasError(AtlasError::Kind::Rank, "obstruction spaces of " + to_string(idx) + " are not in direct sum (rank " +
                                                 std::to_string(rank) + " < " + std::to_string(total) + ")");
  SumChart out;
  out.chart = reduce_chart(p, ChartSpec{idx, center, E, radius}, tol);
  for (const auto* s : summands) out.changes.push_back(inclusion_change(*s, out.chart));
  return out;
}

Atlas assemble_atlas(const GlobalProblem& p, const std::vector<ReducedChart>& charts) {
  Atlas a;
  a.dimension = p.n() - p.m();
  a.kind = DeclaredKind::Weak;
  std::map<IndexSet, const ReducedChart*> by;
  for (const auto& c : charts) {
    if (!by.emplace(c.chart.index, &c).second)
      throw AtlasError(AtlasError::Kind::Schema, "duplicate chart " + to_string(c.chart.index));
    if (c.chart.index.size() == 1) ++a.basic_count;
  }
  for (const auto& [I, c] : by) {
    a.index_sets.push_back(I);
    a.charts[I] = c->chart;
    if (c->orientation < 0)
      a.orientation[I] = OrientationFrame{I, RationalMatrix::identity(c->chart.dim()),
                                          RationalMatrix::identity(c->E.cols()), -1};
  }
  std::sort(a.index_sets.begin(), a.index_sets.end(), [](const IndexSet& x, const IndexSet& y) {
    return x.size() != y.size() ? x.size() < y.size() : x < y;
  });
  for (const auto& [I, ci] : by)
    for (const auto& [J, cj] : by)
      if (is_proper_subset(I, J)) a.changes[{I, J}] = inclusion_change(*ci, *cj);
  a.check_structure();
  return a;
}

std::vector<std::string> generator_names() { return {"planar", "quartic", "identity", "cubic", "three_chart"}; }

GlobalProblem problem_by_name(const std::string& name) {
  auto make = [&](std::vector<std::string> F, std::vector<std::pair<std::string, std::string>> box) {
    Json j;
    j["name"] = name;
    j["section"] = F;
    Json reg = Json::array();
    for (const auto& [lo, hi] : box) reg.push_back({lo, hi});
    j["region"] = reg;
    return GlobalProblem::from_json(j);
  };
  if (name == "planar") return make({"x1^2 - x2^2 - 1/4", "2*x1*x2"}, {{"-2", "2"}, {"-2", "2"}});
  if (name == "quartic") return make({"x1^4 - x1^2"}, {{"-2", "2"}});
  if (name == "identity") return make({"x1"}, {{"-2", "2"}});
  if (name == "cubic") return make({"x1^3 - x1"}, {{"-2", "2"}});
  if (name == "three_chart") return make({"x1^3 - 1/4*x1", "x2", "x3"}, {{"-1", "1"}, {"-1", "1"}, {"-1", "1"}});
  throw AtlasError(AtlasError::Kind::Schema, "unknown generator '" + name + "'");
}

Json generator_document(const std::string& name) {
  Json doc = problem_by_name(name).to_json();
  auto chart = [](std::vector<int> index, std::vector<double> center, std::vector<std::vector<int>> cols, double r) {
    Json c;
    c["index"] = index;
    c["center"] = center;
    c["obstruction"] = cols;
    c["radius"] = r;
    return c;
  };
  auto sum = [](std::vector<IndexSet> parts, std::vector<double> center, double r) {
    Json c;
    c["parts"] = parts;
    c["center"] = center;
    c["radius"] = r;
    return c;
  };
  Json charts = Json::array(), sums = Json::array();
  if (name == "planar") {
    charts = {chart({1}, {0.5, 0}, {{1, 0}, {0, 1}}, 0.25), chart({2}, {-0.5, 0}, {{1, 0}, {0, 1}}, 0.25)};
  } else if (name == "quartic") {
    // the degenerate zero at 0 is covered by a line-obstruction chart; ±1 by point charts
    charts = {chart({1}, {0}, {{1}}, 1.5), chart({2}, {1}, {}, 0), chart({3}, {-1}, {}, 0)};
    sums = {sum({{1}, {2}}, {1}, 0.25), sum({{1}, {3}}, {-1}, 0.25)};
  } else if (name == "identity") {
    charts = {chart({1}, {0}, {}, 0), chart({2}, {0}, {{1}}, 1.0)};
    sums = {sum({{1}, {2}}, {0}, 0.5)};
  } else if (name == "cubic") {
    charts = {chart({1}, {-1}, {}, 0), chart({2}, {0}, {}, 0), chart({3}, {1}, {}, 0), chart({4}, {0}, {{1}}, 1.5)};
    sums = {sum({{1}, {4}}, {-1}, 0.25), sum({{2}, {4}}, {0}, 0.25), sum({{3}, {4}}, {1}, 0.25)};
  } else if (name == "three_chart") {
    charts = {chart({1}, {0, 0, 0}, {{1, 0, 0}}, 0.9), chart({2}, {0.5, 0, 0}, {{0, 1, 0}}, 0.3),
              chart({3}, {0.5, 0, 0}, {{0, 0, 1}}, 0.3)};
    sums = {sum({{1}, {2}}, {0.5, 0, 0}, 0.3), sum({{1}, {3}}, {0.5, 0, 0}, 0.3), sum({{2}, {3}}, {0.5, 0, 0}, 0.3),
            sum({{1}, {2}, {3}}, {0.5, 0, 0}, 0.3)};
  }
  doc["charts"] = charts;
  doc["sums"] = sums;
  return doc;
}

GeneratedAtlas generate_from(const Json& doc, const GeneratorTolerances& tol) {
  GeneratedAtlas g;
  g.problem = GlobalProblem::from_json(doc);
  const GlobalProblem& p = g.problem;
  auto center_of = [&](const Json& j) {
    auto c = j.at("center").get<std::vector<double>>();
    if (static_cast<int>(c.size()) != p.n()) throw AtlasError(AtlasError::Kind::Schema, "center has wrong dimension");
    return Vec(Eigen::Map<const Vec>(c.data(), p.n()));
  };
  std::vector<ChartSpec> specs;
  for (const auto& cj : doc.at("charts")) {
    const Json& cols = cj.at("obstruction");
    RationalMatrix E(p.m(), static_cast<int>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (static_cast<int>(cols[c].size()) != p.m())
        throw AtlasError(AtlasError::Kind::Schema, "obstruction column has wrong length");
      for (int r = 0; r < p.m(); ++r) E(r, static_cast<int>(c)) = json_rational(cols[c][static_cast<std::size_t>(r)]);
    }
    IndexSet I = cj.at("index").get<IndexSet>();
    if (I.size() != 1) throw AtlasError(AtlasError::Kind::Schema, "basic chart index must be a singleton");
    specs.push_back({I, center_of(cj), E, cj.at("radius").get<double>()});
  }
  // per-center reductions are independent
  g.charts = parallel_map<ReducedChart>(specs.size(), [&](std::size_t i) { return reduce_chart(p, specs[i], tol); });
  std::map<IndexSet, std::size_t> pos;
  for (std::size_t i = 0; i < g.charts.size(); ++i) pos[g.charts[i].chart.index] = i;
  std::vector<ReducedChart> extra;
  if (doc.contains("sums"))
    for (const auto& sj : doc.at("sums")) {
      std::vector<const ReducedChart*> parts;
      for (const auto& I : sj.at("parts")) {
        auto it = pos.find(I.get<IndexSet>());
        if (it == pos.end()) throw AtlasError(AtlasError::Kind::Schema, "sum refers to an unknown basic chart");
        parts.push_back(&g.charts[it->second]);
      }
      extra.push_back(sum_chart(p, parts, center_of(sj), sj.at("radius").get<double>(), tol).chart);
    }
  for (auto& c : extra) g.charts.push_back(std::move(c));
  g.atlas = assemble_atlas(p, g.charts);
  return g;
}

GeneratedAtlas generate(const std::string& name, const GeneratorTolerances& tol) {
  return generate_from(generator_document(name), tol);
}

// ---------------------------------------------------------------------------------------
// oracles

namespace {

OracleResult degree_1d(const GlobalProblem& p, const OracleOptions& opt) {
  const double a = p.region.lo_d[0], b = p.region.hi_d[0];
  auto f = [&](double x) { return p.F.eval(Vec::Constant(1, x))[0]; };
  auto scan = [&](int N, std::vector<Vec>* roots) {
    int deg = 0;
    double xp = a, fp = f(a);
    for (int i = 1; i <= N; ++i) {
      double x = a + (b - a) * i / N, fx = f(x);
      if ((fp < 0 && fx > 0) || (fp > 0 && fx < 0)) {
        deg += fx > 0 ? 1 : -1;
        if (roots) {
          double lo = xp, hi = x, flo = fp;
          for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
            double mid = 0.5 * (lo + hi), fm = f(mid);
            if ((fm < 0) == (flo < 0)) {
              lo = mid;
              flo = fm;
            } else {
              hi = mid;
            }
          }
          roots->push_back(Vec::Constant(1, 0.5 * (lo + hi)));
        }
      }
      if (fx != 0.0) {
        xp = x;
        fp = fx;
      }
    }
    return deg;
  };
  OracleResult r;
  int N = std::max(2, opt.density);
  int prev = scan(N, nullptr);
  while (2 * N <= opt.max_density) {
    int next = scan(2 * N, nullptr);
    N *= 2;
    if (next == prev) break;
    prev = next;
  }
  r.degree = scan(N, &r.roots);
  r.resolution = N;
  return r;
}

OracleResult degree_2d(const GlobalProblem& p, const OracleOptions& opt) {
  const Vec lo = p.region.lo_d, hi = p.region.hi_d;
  // counterclockwise boundary
  const Vec corners[4] = {Vec((Vec(2) << lo[0], lo[1]).finished()), Vec((Vec(2) << hi[0], lo[1]).finished()),
                          Vec((Vec(2) << hi[0], hi[1]).finished()), Vec((Vec(2) << lo[0], hi[1]).finished())};
  for (int N = std::max(4, opt.density); N <= opt.max_density; N *= 2) {
    double total = 0.0, worst = 0.0;
    Vec prev = p.F.eval(corners[0]);
    for (int e = 0; e < 4; ++e)
      for (int i = 1; i <= N; ++i) {
        double t = static_cast<double>(i) / N;
        Vec x = (1 - t) * corners[e] + t * corners[(e + 1) % 4];
        Vec fx = p.F.eval(x);
        double d = std::atan2(prev[0] * fx[1] - prev[1] * fx[0], prev.dot(fx));
        total += d;
        worst = std::max(worst, std::fabs(d));
        prev = fx;
      }
    if (worst < std::numbers::pi / 8) {
      OracleResult r;
      r.degree = static_cast<int>(std::lround(total / (2 * std::numbers::pi)));
      r.resolution = N;
      return r;
    }
  }
  throw std::runtime_error("winding number did not resolve at the maximal boundary density");
}

OracleResult degree_3d(const GlobalProblem& p, const OracleOptions& opt) {
  const Vec lo = p.region.lo_d, hi = p.region.hi_d;
  const double cos_limit = std::cos(std::numbers::pi / 8);
  for (int N = std::max(4, opt.density / 4); N <= opt.max_density; N *= 2) {
    double total = 0.0;
    bool fine = true;
    for (int i = 0; i < 3 && fine; ++i)
      for (int side = 0; side < 2 && fine; ++side) {
        const int j = (i + 1) % 3, k = (i + 2) % 3;
        std::vector<Vec> img(static_cast<std::size_t>((N + 1) * (N + 1)));
        for (int a = 0; a <= N; ++a)
          for (int b = 0; b <= N; ++b) {
            Vec x(3);
            x[i] = side ? hi[i] : lo[i];
            x[j] = lo[j] + (hi[j] - lo[j]) * a / N;
            x[k] = lo[k] + (hi[k] - lo[k]) * b / N;
            Vec fx = p.F.eval(x);
            img[static_cast<std::size_t>(a * (N + 1) + b)] = fx / fx.norm();
          }
        auto at = [&](int a, int b) -> const Vec& { return img[static_cast<std::size_t>(a * (N + 1) + b)]; };
        auto omega = [&](const Vec& u, const Vec& v, const Vec& w) {
          Eigen::Vector3d A = u, B = v, C = w;
          if (A.dot(B) < cos_limit || B.dot(C) < cos_limit || C.dot(A) < cos_limit) fine = false;
          return 2.0 * std::atan2(A.dot(B.cross(C)), 1.0 + A.dot(B) + B.dot(C) + C.dot(A));
        };
        const double orient = side ? 1.0 : -1.0;
        for (int a = 0; a < N; ++a)
          for (int b = 0; b < N; ++b) {
            double s = omega(at(a, b), at(a + 1, b), at(a + 1, b + 1)) + omega(at(a, b), at(a + 1, b + 1), at(a, b + 1));
            total += orient * s;
          }
      }
    if (fine) {
      OracleResult r;
      r.degree = static_cast<int>(std::lround(total / (4 * std::numbers::pi)));
      r.resolution = N;
      return r;
    }
  }
  throw std::runtime_error("boundary solid angle did not resolve at the maximal density");
}

}  // namespace

OracleResult brute_force_degree(const GlobalProblem& p, const OracleOptions& opt) {
  if (p.n() != p.m()) throw AtlasError(AtlasError::Kind::Dimension, "degree needs a square system");
  double margin = boundary_margin(p, std::max(16, opt.density));
  if (!(margin > 1e-9)) throw AtlasError(AtlasError::Kind::Precompact, "F vanishes near the region boundary");
  OracleResult r;
  switch (p.n()) {
    case 1: r = degree_1d(p, opt); break;
    case 2: r = degree_2d(p, opt); break;
    case 3: r = degree_3d(p, opt); break;
    default: throw AtlasError(AtlasError::Kind::Dimension, "degree oracle supports n <= 3");
  }
  r.boundary_margin = margin;
  return r;
}

}  // namespace kuranishi
