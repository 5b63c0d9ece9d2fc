#pragma once

#include "kuranishi/domain.hpp"
#include "kuranishi/rational_matrix.hpp"
#include "kuranishi/smooth_map.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace kuranishi {

enum class MetricKind { Euclidean, Pullback };

// Metric on a chart domain.  Pullback charts use the chordal metric
// |phi(u) - phi(u')| through the change into `target`.
struct ChartMetric {
  MetricKind kind = MetricKind::Euclidean;
  IndexSet target;
};

struct Chart {
  IndexSet index;
  Domain domain;
  int obstruction_dim = 0;
  SmoothMap section;
  ChartMetric metric;

  int dim() const { return domain.dim(); }
};

struct ChangeBranch {
  Domain domain;
  SmoothMap phi;
};

struct Preimage {
  Vec y;
  int branch = -1;
  double residual = 0.0;
  bool inside = false;  // y lies in the branch domain
};

class CoordinateChange {
 public:
  CoordinateChange() = default;
  CoordinateChange(IndexSet source, IndexSet target, std::vector<ChangeBranch> branches, RationalMatrix hat_phi,
                   int source_dim = -1, int target_dim = -1);

  const IndexSet& source() const { return source_; }
  const IndexSet& target() const { return target_; }
  const std::vector<ChangeBranch>& branches() const { return branches_; }
  const RationalMatrix& hat_phi() const { return hat_; }
  const Mat& hat_phi_d() const { return hat_d_; }
  int source_dim() const { return src_dim_; }
  int target_dim() const { return tgt_dim_; }

  Domain domain() const;
  bool empty() const { return branches_.empty(); }
  int branch_at(const Vec& x) const;
  bool contains(const Vec& x) const { return branch_at(x) >= 0; }
  // phi(x) for x in the domain.
  std::optional<Vec> apply(const Vec& x) const;
  Vec apply_branch(int b, const Vec& x) const;
  Mat jacobian_branch(int b, const Vec& x) const;
  // Point of the domain closest (in the image) to x; nullopt if no branch has a candidate.
  std::optional<Preimage> project(const Vec& x) const;
  // Exact preimage within tolerance, inside the domain.
  std::optional<Vec> invert(const Vec& x, double tol) const;

 private:
  Preimage project_branch(int b, const Vec& x) const;

  IndexSet source_, target_;
  std::vector<ChangeBranch> branches_;
  RationalMatrix hat_;
  Mat hat_d_;
  int src_dim_ = 0, tgt_dim_ = 0;
  struct AffineCache {
    bool affine = false;
    Mat A, pinv;
    Vec b;
  };
  std::vector<AffineCache> affine_;
};

struct OrientationFrame {
  IndexSet index;
  RationalMatrix domain_frame;       // columns: ordered basis of the domain directions
  RationalMatrix obstruction_frame;  // columns: ordered basis of E_I
  int sign = 1;
};

enum class DeclaredKind { Weak, Standard, Strong, Tame };
const char* declared_kind_name(DeclaredKind k);
DeclaredKind parse_declared_kind(const std::string& s);

class Atlas {
 public:
  int dimension = 0;
  int basic_count = 0;
  DeclaredKind kind = DeclaredKind::Weak;
  bool concordance = false;
  std::vector<IndexSet> index_sets;  // sorted by size, then lexicographically
  std::map<IndexSet, Chart> charts;
  std::map<std::pair<IndexSet, IndexSet>, CoordinateChange> changes;
  std::map<IndexSet, OrientationFrame> orientation;

  bool has_chart(const IndexSet& I) const { return charts.count(I) > 0; }
  const Chart& chart(const IndexSet& I) const;
  bool has_change(const IndexSet& I, const IndexSet& J) const { return changes.count({I, J}) > 0; }
  const CoordinateChange& change(const IndexSet& I, const IndexSet& J) const;
  OrientationFrame frame(const IndexSet& I) const;  // standard frame when none declared
  std::vector<IndexSet> lower(const IndexSet& J) const;   // I in poset with I ⊊ J
  std::vector<IndexSet> higher(const IndexSet& I) const;  // J in poset with I ⊊ J
  int max_level() const;

  // Exact structural invariants; throws AtlasError.
  void check_structure() const;
};

Chart restrict_chart(const Chart& chart, const Domain& sub);
CoordinateChange compose_changes(const CoordinateChange& ij, const CoordinateChange& jk);
// New chart domains U'_I; transition domains become U_IJ ∩ U'_I ∩ phi^{-1}(U'_J).
Atlas shrink(const Atlas& atlas, const std::map<IndexSet, Domain>& new_domains);
Atlas shrink_uniform(const Atlas& atlas, const Rational& margin);
Atlas product_concordance(const Atlas& atlas, const Rational& collar = Rational(1, 10));
Atlas slice_concordance(const Atlas& atlas, const Rational& t);
bool same_fields(const Atlas& a, const Atlas& b, std::string* why = nullptr);

// Euclidean distance between two points of a chart, respecting a pullback metric.
double chart_distance(const Atlas& atlas, const IndexSet& I, const Vec& a, const Vec& b);

}  // namespace kuranishi
