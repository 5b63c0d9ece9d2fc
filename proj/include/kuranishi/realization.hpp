#pragma once

#include "kuranishi/atlas.hpp"
#include "kuranishi/atlas_io.hpp"

#include <map>
#include <vector>

namespace kuranishi {

struct CloudPoint {
  IndexSet chart;
  Vec x;
  bool zero = false;
};

struct CloudOptions {
  int density = 20;
  std::uint64_t seed = 0;
  Tolerances tol;
  bool include_zeros = true;
  std::size_t max_points = 500000;
};

// Sampled model of |K|: chart samples closed under the coordinate changes and
// their inverses, with the quotient given by union-find.
class RealizationCloud {
 public:
  std::vector<CloudPoint> points;
  std::vector<std::pair<std::size_t, std::size_t>> identifications;
  std::vector<std::size_t> cls;  // class id per point, numbered by first appearance
  std::size_t class_count = 0;
  std::map<IndexSet, std::vector<std::size_t>> by_chart;
  int density = 0;
  std::uint64_t seed = 0;
  bool truncated = false;

  std::vector<std::vector<std::size_t>> members() const;
};

RealizationCloud build_cloud(const Atlas& atlas, const CloudOptions& opt);

struct ZeroClass {
  std::size_t id = 0;
  std::vector<std::size_t> members;
  std::vector<IndexSet> charts;  // sorted
  IndexSet top;                  // union of the charts
};

// Classes meeting the zero sets; throws AtlasError(Cover) when a class lies in
// charts I and J with I ∪ J outside the poset.
std::vector<ZeroClass> zero_set_X(const Atlas& atlas, const RealizationCloud& cloud, bool refine = true,
                                  const Tolerances& tol = {});

// Surrogate distance on |K|: minimum over charts shared by both classes of the
// chart distance between representatives; 1 when no chart is shared.
double class_distance(const Atlas& atlas, const RealizationCloud& cloud, std::size_t class_a, std::size_t class_b);
std::vector<std::size_t> metric_ball(const Atlas& atlas, const RealizationCloud& cloud, std::size_t point, double radius);

// The zero set of the shrunken atlas must still represent every zero class of the original.
void check_footprints_preserved(const Atlas& original, const Atlas& shrunk, const CloudOptions& opt);

Json cloud_json(const RealizationCloud& cloud);

}  // namespace kuranishi
