#include "kuranishi/realization.hpp"

#include "kuranishi/kernels.hpp"
#include "kuranishi/verdict.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <unordered_map>

namespace kuranishi {

namespace {

struct KeyHash {
  std::size_t operator()(const std::vector<long>& k) const {
    std::uint64_t h = 0x12345;
    for (long v : k) h = mix64(h ^ static_cast<std::uint64_t>(v));
    return static_cast<std::size_t>(h);
  }
};

class ChartIndex {
 public:
  explicit ChartIndex(double cell) : cell_(cell) {}
  std::vector<long> key(const Vec& x) const {
    std::vector<long> k(x.size());
    for (int i = 0; i < x.size(); ++i) k[i] = static_cast<long>(std::floor(x[i] / cell_));
    return k;
  }
  long find(const Vec& x, const std::vector<CloudPoint>& pts, double tol) const {
    auto k = key(x);
    const int n = static_cast<int>(x.size());
    int combos = 1;
    for (int i = 0; i < n; ++i) combos *= 3;
    for (int c = 0; c < combos; ++c) {
      auto kk = k;
      int r = c;
      for (int i = 0; i < n; ++i) {
        kk[i] += r % 3 - 1;
        r /= 3;
      }
      auto it = map_.find(kk);
      if (it == map_.end()) continue;
      for (std::size_t idx : it->second)
        if ((pts[idx].x - x).norm() < tol) return static_cast<long>(idx);
    }
    return -1;
  }
  void insert(const Vec& x, std::size_t idx) { map_[key(x)].push_back(idx); }

 private:
  double cell_;
  std::unordered_map<std::vector<long>, std::vector<std::size_t>, KeyHash> map_;
};

struct UnionFind {
  std::vector<std::size_t> p;
  std::size_t find(std::size_t a) {
    while (p[a] != a) {
      p[a] = p[p[a]];
      a = p[a];
    }
    return a;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) p[b] = a;
    else p[a] = b;
  }
};

bool is_zero(const Chart& c, const Vec& x, double tol) {
  if (c.obstruction_dim == 0) return true;
  return c.section.eval(x).norm() < tol;
}

}  // namespace

std::vector<std::vector<std::size_t>> RealizationCloud::members() const {
  std::vector<std::vector<std::size_t>> m(class_count);
  for (std::size_t i = 0; i < points.size(); ++i) m[cls[i]].push_back(i);
  return m;
}

RealizationCloud build_cloud(const Atlas& atlas, const CloudOptions& opt) {
  RealizationCloud cloud;
  cloud.density = opt.density;
  cloud.seed = opt.seed;
  const double tol = opt.tol.id;
  std::map<IndexSet, ChartIndex> index;
  for (const auto& I : atlas.index_sets) index.emplace(I, ChartIndex(10 * tol));

  // per-chart seeds: samples plus zeros, computed independently
  auto seeds = parallel_map<std::vector<Vec>>(atlas.index_sets.size(), [&](std::size_t i) {
    const IndexSet& I = atlas.index_sets[i];
    const Chart& c = atlas.chart(I);
    if (c.domain.empty()) return std::vector<Vec>{};
    std::uint64_t s = hash_index_set(I, opt.seed);
    auto pts = sample_domain(c.domain, opt.density, s);
    if (opt.include_zeros && c.obstruction_dim > 0) {
      auto z = locate_zeros(c.section, c.domain, opt.density, s ^ 0x5a5a, tol, Exec::Serial);
      pts.insert(pts.end(), z.begin(), z.end());
    }
    return pts;
  });

  std::deque<std::size_t> queue;
  auto add = [&](const IndexSet& I, const Vec& x) -> std::size_t {
    auto& idx = index.at(I);
    long f = idx.find(x, cloud.points, tol);
    if (f >= 0) return static_cast<std::size_t>(f);
    if (cloud.points.size() >= opt.max_points) {
      cloud.truncated = true;
      return static_cast<std::size_t>(-1);
    }
    std::size_t id = cloud.points.size();
    cloud.points.push_back(CloudPoint{I, x, is_zero(atlas.chart(I), x, opt.tol.eq)});
    idx.insert(x, id);
    cloud.by_chart[I].push_back(id);
    queue.push_back(id);
    return id;
  };
  for (std::size_t i = 0; i < atlas.index_sets.size(); ++i)
    for (const auto& x : seeds[i]) add(atlas.index_sets[i], x);

  while (!queue.empty()) {
    std::size_t id = queue.front();
    queue.pop_front();
    const IndexSet I = cloud.points[id].chart;
    const Vec x = cloud.points[id].x;
    for (const auto& J : atlas.higher(I)) {
      const auto& ch = atlas.change(I, J);
      auto y = ch.apply(x);
      if (!y || !atlas.chart(J).domain.contains(*y)) continue;
      std::size_t j = add(J, *y);
      if (j != static_cast<std::size_t>(-1)) cloud.identifications.emplace_back(id, j);
    }
    for (const auto& H : atlas.lower(I)) {
      const auto& ch = atlas.change(H, I);
      auto y = ch.invert(x, tol);
      if (!y) continue;
      std::size_t h = add(H, *y);
      if (h != static_cast<std::size_t>(-1)) cloud.identifications.emplace_back(h, id);
    }
  }

  UnionFind uf;
  uf.p.resize(cloud.points.size());
  std::iota(uf.p.begin(), uf.p.end(), 0);
  for (const auto& [a, b] : cloud.identifications) uf.unite(a, b);
  std::map<std::size_t, std::size_t> dense;
  cloud.cls.resize(cloud.points.size());
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    std::size_t r = uf.find(i);
    auto it = dense.find(r);
    if (it == dense.end()) it = dense.emplace(r, dense.size()).first;
    cloud.cls[i] = it->second;
  }
  cloud.class_count = dense.size();
  return cloud;
}

std::vector<ZeroClass> zero_set_X(const Atlas& atlas, const RealizationCloud& cloud, bool refine, const Tolerances& tol) {
  std::vector<char> zero(cloud.points.size(), 0);
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const auto& p = cloud.points[i];
    const Chart& c = atlas.chart(p.chart);
    if (c.obstruction_dim == 0) {
      zero[i] = 1;
      continue;
    }
    double r = c.section.eval(p.x).norm();
    if (refine && r < 1e-6 && r >= tol.eq) {
      // polish; the point counts when Newton lands on a zero within the identification tolerance
      auto nr = newton_solve([&](const Vec& x) { return c.section.eval(x); },
                             [&](const Vec& x) { return c.section.jacobian(x); }, p.x);
      if (nr.converged && (nr.x - p.x).norm() < tol.id) r = 0.0;
    }
    zero[i] = r < tol.eq;
  }
  auto mem = cloud.members();
  std::vector<ZeroClass> out;
  for (std::size_t k = 0; k < mem.size(); ++k) {
    bool any = false;
    for (std::size_t i : mem[k]) any |= zero[i] != 0;
    if (!any) continue;
    ZeroClass z;
    z.id = k;
    z.members = mem[k];
    for (std::size_t i : mem[k]) {
      const auto& I = cloud.points[i].chart;
      if (std::find(z.charts.begin(), z.charts.end(), I) == z.charts.end()) z.charts.push_back(I);
      z.top = set_union(z.top, I);
    }
    std::sort(z.charts.begin(), z.charts.end());
    for (std::size_t a = 0; a < z.charts.size(); ++a)
      for (std::size_t b = a + 1; b < z.charts.size(); ++b) {
        IndexSet u = set_union(z.charts[a], z.charts[b]);
        if (!atlas.has_chart(u)) {
          std::string where;
          for (std::size_t i : z.members)
            if (cloud.points[i].chart == z.charts[a]) {
              where = " at " + vec_json(cloud.points[i].x).dump();
              break;
            }
          throw AtlasError(AtlasError::Kind::Cover, "zero class " + std::to_string(k) + " meets charts " +
                                                        to_string(z.charts[a]) + " and " + to_string(z.charts[b]) +
                                                        " but " + to_string(u) + " is not in the poset" + where);
        }
      }
    out.push_back(std::move(z));
  }
  return out;
}

double class_distance(const Atlas& atlas, const RealizationCloud& cloud, std::size_t a, std::size_t b) {
  if (a == b) return 0.0;
  auto mem = cloud.members();
  double best = 1.0;
  for (std::size_t i : mem[a])
    for (std::size_t j : mem[b])
      if (cloud.points[i].chart == cloud.points[j].chart)
        best = std::min(best, chart_distance(atlas, cloud.points[i].chart, cloud.points[i].x, cloud.points[j].x));
  return best;
}

std::vector<std::size_t> metric_ball(const Atlas& atlas, const RealizationCloud& cloud, std::size_t point, double radius) {
  auto mem = cloud.members();
  std::size_t c = cloud.cls[point];
  std::vector<std::size_t> out;
  for (std::size_t q = 0; q < cloud.points.size(); ++q) {
    if (cloud.cls[q] == c) {
      out.push_back(q);
      continue;
    }
    if (radius <= 0) continue;
    double best = 1.0;
    for (std::size_t i : mem[c])
      for (std::size_t j : mem[cloud.cls[q]])
        if (cloud.points[i].chart == cloud.points[j].chart)
          best = std::min(best, chart_distance(atlas, cloud.points[i].chart, cloud.points[i].x, cloud.points[j].x));
    if (best < radius) out.push_back(q);
  }
  return out;
}

void check_footprints_preserved(const Atlas& original, const Atlas& shrunk, const CloudOptions& opt) {
  CloudOptions o = opt;
  RealizationCloud before = build_cloud(original, o);
  auto zs = zero_set_X(original, before, true, opt.tol);
  for (const auto& z : zs) {
    bool kept = false;
    for (std::size_t i : z.members) {
      const auto& p = before.points[i];
      if (shrunk.chart(p.chart).domain.contains(p.x)) kept = true;
    }
    if (!kept) {
      const auto& p = before.points[z.members.front()];
      throw AtlasError(AtlasError::Kind::Cover, "shrinking loses the zero " + vec_json(p.x).dump() + " of chart " +
                                                    to_string(p.chart));
    }
  }
  // every nonempty footprint stays nonempty
  for (const auto& I : original.index_sets) {
    bool had = false, has = false;
    for (const auto& z : zs)
      for (std::size_t i : z.members)
        if (before.points[i].chart == I) {
          had = true;
          if (shrunk.chart(I).domain.contains(before.points[i].x)) has = true;
        }
    if (had && !has) throw AtlasError(AtlasError::Kind::Cover, "footprint of " + to_string(I) + " becomes empty");
  }
}

Json cloud_json(const RealizationCloud& cloud) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    Json r;
    r["class"] = cloud.cls[i];
    r["chart"] = to_string(cloud.points[i].chart);
    r["x"] = vec_json(cloud.points[i].x);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace kuranishi
