#pragma once

#include <ostream>

namespace coalesce {

// Runs the full acceptance suite: ten independent criteria covering the
// determinant formula, the ghost-free marginal, the proof machinery
// (castings, attribution, rehearsal, involution) and the Brownian limit,
// each validated against exact oracles or pinned closed-form values.
// Prints one pass/fail line per criterion to `os` and returns true iff
// every criterion passed within its time budget.
bool run_acceptance(std::ostream& os);

}  // namespace coalesce
