#include "kuranishi/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace kuranishi {

namespace {
int g_jobs = 0;
Exec g_exec = Exec::Parallel;
}  // namespace

void set_jobs(int n) { g_jobs = n; }
int jobs() { return g_jobs > 0 ? g_jobs : omp_get_max_threads(); }
Exec default_exec() { return g_exec; }
void set_default_exec(Exec e) { g_exec = e; }

std::vector<Vec> eval_batch(const SmoothMap& f, const std::vector<Vec>& pts, Exec exec) {
  return parallel_map<Vec>(pts.size(), [&](std::size_t i) { return f.eval(pts[i]); }, exec);
}

std::vector<double> norm_batch(const SmoothMap& f, const std::vector<Vec>& pts, Exec exec) {
  return parallel_map<double>(pts.size(), [&](std::size_t i) { return f.eval(pts[i]).norm(); }, exec);
}

NewtonResult newton_solve(const VecFn& F, const MatFn& J, const Vec& x0, const NewtonOptions& opt) {
  NewtonResult r;
  r.x = x0;
  Vec f = F(r.x);
  r.residual = f.norm();
  for (int it = 0; it < opt.max_iter; ++it) {
    r.iterations = it + 1;
    if (f.size() == 0 || r.x.size() == 0) break;
    Mat Jx = J(r.x);
    Vec step = Jx.completeOrthogonalDecomposition().solve(f);
    if (!step.allFinite()) break;
    double sn = step.norm();
    if (sn > opt.max_step) step *= opt.max_step / sn;
    r.x -= step;
    f = F(r.x);
    r.residual = f.norm();
    if (!std::isfinite(r.residual)) break;
    if (step.norm() < opt.step_tol) break;
    if (r.residual < opt.residual_tol * 1e-4) break;
  }
  r.converged = std::isfinite(r.residual) && r.residual < opt.residual_tol;
  return r;
}

std::vector<NewtonResult> newton_multistart(const VecFn& F, const MatFn& J, const std::vector<Vec>& seeds,
                                            const NewtonOptions& opt, Exec exec) {
  return parallel_map<NewtonResult>(seeds.size(), [&](std::size_t i) { return newton_solve(F, J, seeds[i], opt); }, exec);
}

GridMin grid_min(const std::function<double(const Vec&)>& g, const std::vector<Vec>& pts, Exec exec) {
  auto vals = parallel_map<double>(pts.size(), [&](std::size_t i) { return g(pts[i]); }, exec);
  GridMin m{std::numeric_limits<double>::infinity(), 0};
  for (std::size_t i = 0; i < vals.size(); ++i)
    if (vals[i] < m.value) m = {vals[i], i};
  return m;
}

std::vector<Vec> dedupe_points(std::vector<Vec> pts, double tol) {
  std::sort(pts.begin(), pts.end(), [](const Vec& a, const Vec& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  });
  std::vector<Vec> out;
  for (auto& p : pts) {
    bool dup = false;
    for (const auto& q : out)
      if ((p - q).norm() < tol) {
        dup = true;
        break;
      }
    if (!dup) out.push_back(std::move(p));
  }
  return out;
}

std::vector<Vec> locate_zeros(const SmoothMap& f, const Domain& D, int density, std::uint64_t seed, double dedupe,
                              Exec exec) {
  if (D.empty()) return {};
  auto seeds = sample_domain(D, density, seed);
  if (f.codomain_dim() == 0) return seeds;
  auto F = [&](const Vec& x) { return f.eval(x); };
  auto J = [&](const Vec& x) { return f.jacobian(x); };
  NewtonOptions opt;
  Box bb = D.bounding_box();
  opt.max_step = 0.25 * bb.widths().maxCoeff();
  auto res = newton_multistart(F, J, seeds, opt, exec);
  std::vector<Vec> found;
  for (auto& r : res)
    if (r.converged && D.contains(r.x)) found.push_back(r.x);
  return dedupe_points(std::move(found), dedupe);
}

}  // namespace kuranishi
