#pragma once

#include "kuranishi/atlas_io.hpp"

#include <string>
#include <vector>

namespace kuranishi::fixtures {

// Two basic charts over X = {-1, 0, 1}; s_1 = x^4 - x^2 with the change into (x, y).
Json ex_change();
// Circle with three basic charts; pi_K is not injective on U_3.
Json ex_nonlin();
// Additive variant with four basic charts; the non-injectivity moves to U_34.
Json ku30_additive();
// Satisfies the filtration identity but E_12 is not spanned by the basic images.
Json ku30_nonadditive();
// Quotient R x {0} ∪ (0,2) x (-1,1).
Json ex_khomeo();
// Index condition fails at u = 0.
Json index_fail();
// Transition domains that overlap without a triple chart; no uniform shrinking is tame.
Json tame_exhaustion();
// Three basic charts with bump-warped transition coordinates; tame.
Json bump_warp();
// x -> (2x, 0) is not an isometry.
Json stretch();
// Two basic charts with the same obstruction line in E_12.
Json dependent_sum();
// One chart with polynomial section on a box.
Json single_chart(const std::vector<std::string>& section, const std::vector<std::pair<std::string, std::string>>& box,
                  int obstruction_dim = -1);

std::vector<std::string> names();
Json by_name(const std::string& name);

}  // namespace kuranishi::fixtures
