#pragma once

#include "kuranishi/atlas_io.hpp"
#include "kuranishi/verdict.hpp"

#include <string>
#include <vector>

namespace kuranishi {

// F : region ⊂ R^n -> R^m with F^{-1}(0) compactly inside the region.
struct GlobalProblem {
  std::string name;
  SmoothMap F;
  Box region;

  int n() const { return F.domain_dim(); }
  int m() const { return F.codomain_dim(); }
  static GlobalProblem from_json(const Json& j);
  Json to_json() const;
};

// min |F| over a sampled shell at the region's boundary.
double boundary_margin(const GlobalProblem& p, int density);

// Basic chart request: obstruction space spanned by the columns of E, box of the given
// radius (sup metric) around the center in the parameter coordinates.
struct ChartSpec {
  IndexSet index;
  Vec center;
  RationalMatrix E;
  double radius = 0.0;
};

struct ReducedChart {
  Chart chart;
  Vec center;
  std::vector<int> free;               // ambient coordinates used as chart coordinates
  RationalMatrix E;                    // n x e basis of the obstruction space
  std::vector<Polynomial> embedding;   // x(u), one polynomial per ambient coordinate
  double fit_residual = 0.0;
  int orientation = 1;                 // sign relative to the ambient orientation
};

struct GeneratorTolerances {
  double fit = 1e-9;
  double rank = 1e-8;
  int max_degree = 5;
};

// {x : F(x) ∈ E} near the center, parametrized by the coordinates not solved for by the
// implicit function theorem; solved coordinates stored as certified polynomial fits.
ReducedChart reduce_chart(const GlobalProblem& p, const ChartSpec& spec, const GeneratorTolerances& tol = {});
std::vector<ReducedChart> reduce_global(const GlobalProblem& p, const std::vector<ChartSpec>& specs,
                                        const GeneratorTolerances& tol = {});

struct SumChart {
  ReducedChart chart;
  std::vector<CoordinateChange> changes;  // summand -> sum
};
// Obstruction space E_1 ⊕ ... ⊕ E_k; throws AtlasError(Rank) when the sum is not direct.
SumChart sum_chart(const GlobalProblem& p, const std::vector<const ReducedChart*>& summands, const Vec& center,
                   double radius, const GeneratorTolerances& tol = {});
CoordinateChange inclusion_change(const ReducedChart& from, const ReducedChart& to);

// Weak additive atlas from reduced charts (one per index set), with inclusion changes for
// every pair and orientation frames induced from the ambient orientation.
Atlas assemble_atlas(const GlobalProblem& p, const std::vector<ReducedChart>& charts);

struct GeneratedAtlas {
  GlobalProblem problem;
  std::vector<ReducedChart> charts;
  Atlas atlas;
};
// Generator document: the problem fields plus
//   "charts": [{"index": [i], "center": [..], "obstruction": [column, ..], "radius": r}, ..]
//   "sums":   [{"parts": [[i], [j], ..], "center": [..], "radius": r}, ..]
GeneratedAtlas generate_from(const Json& doc, const GeneratorTolerances& tol = {});
std::vector<std::string> generator_names();
Json generator_document(const std::string& name);
GeneratedAtlas generate(const std::string& name, const GeneratorTolerances& tol = {});
GlobalProblem problem_by_name(const std::string& name);

struct OracleOptions {
  int density = 64;      // initial boundary resolution per edge
  int max_density = 1 << 14;
};
struct OracleResult {
  int degree = 0;
  int resolution = 0;
  double boundary_margin = 0.0;
  std::vector<Vec> roots;  // n = 1 only
};
// Topological degree of F over the region: n = 1 sign changes, n = 2 winding number,
// n = 3 signed solid angle of the boundary triangulation.
OracleResult brute_force_degree(const GlobalProblem& p, const OracleOptions& opt = {});

}  // namespace kuranishi
