#pragma once

#include "kuranishi/domain.hpp"
#include "kuranishi/smooth_map.hpp"

#include <exception>
#include <functional>
#include <mutex>
#include <vector>

namespace kuranishi {

// Execution policy for the data-parallel loops.  Both policies produce
// bitwise-identical results: every output slot is computed independently.
enum class Exec { Serial, Parallel };

void set_jobs(int n);  // <= 0 means the OpenMP default
int jobs();
Exec default_exec();
void set_default_exec(Exec e);

template <class T, class F>
std::vector<T> parallel_map(std::size_t n, F&& f, Exec exec = default_exec()) {
  std::vector<T> out(n);
  if (exec == Exec::Serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::exception_ptr err;
  std::mutex mu;
  const long N = static_cast<long>(n);
#pragma omp parallel for schedule(static) num_threads(jobs())
  for (long i = 0; i < N; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  return out;
}

std::vector<Vec> eval_batch(const SmoothMap& f, const std::vector<Vec>& pts, Exec exec = default_exec());
std::vector<double> norm_batch(const SmoothMap& f, const std::vector<Vec>& pts, Exec exec = default_exec());

struct NewtonResult {
  Vec x;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct NewtonOptions {
  int max_iter = 100;
  double step_tol = 1e-15;
  double residual_tol = 1e-11;
  double max_step = 0.5;
};

using VecFn = std::function<Vec(const Vec&)>;
using MatFn = std::function<Mat(const Vec&)>;

// Gauss-Newton (least-norm steps for underdetermined systems).
NewtonResult newton_solve(const VecFn& F, const MatFn& J, const Vec& x0, const NewtonOptions& opt = {});
std::vector<NewtonResult> newton_multistart(const VecFn& F, const MatFn& J, const std::vector<Vec>& seeds,
                                            const NewtonOptions& opt = {}, Exec exec = default_exec());

// Minimum of g over the points; ties broken by lowest index.
struct GridMin {
  double value;
  std::size_t index;
};
GridMin grid_min(const std::function<double(const Vec&)>& g, const std::vector<Vec>& pts, Exec exec = default_exec());

// Zeros of f inside D: Newton from every grid sample, kept when converged and
// inside D, deduplicated at `dedupe` (lexicographic order, first wins).
std::vector<Vec> locate_zeros(const SmoothMap& f, const Domain& D, int density, std::uint64_t seed,
                              double dedupe = 1e-7, Exec exec = default_exec());
std::vector<Vec> dedupe_points(std::vector<Vec> pts, double tol);

}  // namespace kuranishi
