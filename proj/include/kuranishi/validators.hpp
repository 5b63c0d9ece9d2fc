#pragma once

#include "kuranishi/atlas.hpp"
#include "kuranishi/realization.hpp"
#include "kuranishi/verdict.hpp"

#include <cstdint>
#include <vector>

namespace kuranishi {

struct CheckOptions {
  int density = 20;  // samples per axis and per box piece
  std::uint64_t seed = 0;
  Tolerances tol;
};

enum class CocycleLevel { Weak, Standard, Strong };
const char* cocycle_level_name(CocycleLevel l);

// Triples I ⊊ J ⊊ K.  Exact (rational) when all maps involved are polynomial.
Verdict check_cocycle(const Atlas& atlas, CocycleLevel level, const CheckOptions& opt);
// s_J ∘ phi_IJ = hat_IJ ∘ s_I on samples of U_IJ.
Verdict check_intertwining(const Atlas& atlas, const CheckOptions& opt);
// Tangent bundle condition at samples of U_IJ and at the zeros of s_I there.
Verdict check_index_condition(const Atlas& atlas, const CheckOptions& opt);
Verdict check_additivity(const Atlas& atlas);
// im hat_IJ ∩ im hat_HJ = im hat_{I∩H,J}, exact.
Verdict check_filtration(const Atlas& atlas);
Verdict check_tameness(const Atlas& atlas, const CheckOptions& opt);
Verdict check_injectivity_hausdorff(const Atlas& atlas, const RealizationCloud& cloud, const CheckOptions& opt);
Verdict check_metric_admissibility(const Atlas& atlas, const CheckOptions& opt);
Verdict check_sum_conditions(const Atlas& atlas, const CheckOptions& opt);

// Every check appropriate for the declared kind, in report order.
std::vector<Verdict> validate_atlas(const Atlas& atlas, const CheckOptions& opt);

}  // namespace kuranishi
