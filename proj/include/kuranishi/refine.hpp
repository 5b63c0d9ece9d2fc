#pragma once

#include "kuranishi/atlas.hpp"
#include "kuranishi/realization.hpp"
#include "kuranishi/validators.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace kuranishi {

class RefineError : public std::runtime_error {
 public:
  enum class Kind { Exhaustion, Coverage, Separation, Sigma };
  RefineError(Kind kind, const std::string& what, std::vector<Witness> witnesses = {})
      : std::runtime_error(what), kind_(kind), witnesses_(std::move(witnesses)) {}
  Kind kind() const { return kind_; }
  const std::vector<Witness>& witnesses() const { return witnesses_; }

 private:
  Kind kind_;
  std::vector<Witness> witnesses_;
};

struct ShrinkResult {
  Atlas atlas;
  Rational margin;
  int iterations = 0;
  Verdict tameness;
};

// Uniform margins m0, m0/2, ...; the first shrinking whose tameness check passes
// (applied twice when preshrunk) is returned with declared kind tame.
ShrinkResult find_tame_shrinking(const Atlas& atlas, const CheckOptions& opt, int max_iters = 6, bool preshrunk = true,
                                 const Rational& first_margin = Rational(1, 10));

enum class ReductionStyle { Flag, Top };
const char* reduction_style_name(ReductionStyle s);

// ||e||_I = scale * max_i c_i |e_i| over the basic components of e.
struct NormChoice {
  std::map<int, double> basic;  // c_i, default 1
  double scale = 1.0;
  double weight(int i) const;
};

struct SigmaBound {
  double value = 0.0;        // certified lower bound
  double sampled_min = 0.0;  // minimum over the grid
  double slack = 0.0;        // Lipschitz margin L * h * sqrt(n)
  IndexSet chart;            // where the minimum is attained
  Vec point;
};

class ReductionContext {
 public:
  std::shared_ptr<const Atlas> atlas;
  ReductionStyle style = ReductionStyle::Flag;
  std::map<IndexSet, std::vector<Box>> V, C;
  double delta = 0.0, delta_V = 0.0;
  double sigma = 0.0;
  SigmaBound sigma_bound;
  NormChoice norms;
  double id_tol = 1e-7;

  // level radius 2^{-k} delta; V^k_J = {dist(x, V_J) < radius(k)}
  double radius(double k) const;
  double eta(double k) const;  // 2^{-k} (1 - 2^{-1/4}) delta
  double dist_V(const IndexSet& J, const Vec& x) const;
  bool in_V(const IndexSet& J, const Vec& x) const { return dist_V(J, x) == 0.0; }
  bool in_Vk(double k, const IndexSet& J, const Vec& x) const { return dist_V(J, x) < radius(k); }
  bool in_C(const IndexSet& J, const Vec& x) const;
  // C~_J = union over K ⊇ J of phi_JK^{-1}(C_K); depth > 0 inside
  bool in_C_tilde(const IndexSet& J, const Vec& x) const;
  double C_tilde_depth(const IndexSet& J, const Vec& x) const;
  // Surrogate distance from x in U_J to the core N^k_JI; 0 on the core.
  double core_distance(double k, const IndexSet& J, const IndexSet& I, const Vec& x) const;
  bool in_core(double k, const IndexSet& J, const IndexSet& I, const Vec& x) const;
  // Basic components of e in E_J and the additive max-norm.
  std::vector<Vec> components(const IndexSet& J, const Vec& e) const;
  double norm(const IndexSet& J, const Vec& e) const;
  double norm_bound(const IndexSet& J) const;  // ||e||_J <= norm_bound * |e|_2

  Box V_hull(const IndexSet& J) const;  // bounding box of V_J (empty box when V_J is empty)
  Json to_json() const;

 private:
  const Mat& block_inverse(const IndexSet& J) const;
  struct BlockCache {
    std::mutex mu;
    std::map<std::pair<const Atlas*, IndexSet>, Mat> inv;
  };
  std::shared_ptr<BlockCache> cache_ = std::make_shared<BlockCache>();
};

struct ReductionOptions {
  CheckOptions check;
  ReductionStyle style = ReductionStyle::Flag;
};

// V_I as boxes around the zero classes: Flag places a box in every chart of the
// lexicographically first chain of charts containing the class, Top only in the top chart.
ReductionContext build_reduction(const Atlas& atlas, const ReductionOptions& opt);
// C_I = concentric boxes of half radius; delta_V = min(1/4, margin/2, sep/4); delta = delta_V / 2
// unless delta_override > 0.
void build_nested(ReductionContext& ctx, const CheckOptions& opt, double delta_override = 0.0);
// Build a context from explicit V and C boxes (constants as in build_nested).
ReductionContext make_context(const Atlas& atlas, std::map<IndexSet, std::vector<Box>> V,
                              std::map<IndexSet, std::vector<Box>> C, const CheckOptions& opt,
                              double delta_override = 0.0);

struct DeltaParts {
  double margin = 0.0;  // min distance from V_I to the complement of U_I
  double separation = 1.0;  // min distance between pi(V_I), pi(V_J), I and J incomparable (capped at 1)
  double delta_V = 0.0;
};
DeltaParts compute_delta_V(const Atlas& atlas, const std::map<IndexSet, std::vector<Box>>& V, const CheckOptions& opt);

// min_J inf ||s_J|| over cl(V^{|J|}_J) minus C~_J and the core balls; throws RefineError(Sigma) when <= 0.
SigmaBound compute_sigma(const ReductionContext& ctx, const CheckOptions& opt);

// Nesting, separation and level-set inclusions on samples.
Verdict check_reduction(const ReductionContext& ctx, const CheckOptions& opt);
Verdict check_level_sets(const ReductionContext& ctx, const CheckOptions& opt);
// 2^{-k} delta - eta_k - 2^{-k-1/2} delta: positive iff B_{eta_k}(V^{k+1/2}) ⊆ V^k
double level_inclusion_margin(const ReductionContext& ctx, double k);

ReductionContext reduction_from_json(const Atlas& atlas, const Json& j);

}  // namespace kuranishi
