#pragma once

// Delete-relaxed planning graph over snap-actions with numeric envelopes.

#include "tnplan/state.hpp"

namespace tnplan {

/// Number of snaps in a relaxed plan reaching the goal with every open action
/// ended, or kInf when the relaxation never reaches it.
double evaluate_heuristic(const Problem& problem, const SearchState& state);

}  // namespace tnplan
