#pragma once

// Weighted A* forward search over snap-actions.

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "tnplan/compile.hpp"

namespace tnplan {

/// Range of sum(weight * var) + constant over the bound box.
Bounds interval_of(const LinearExpr& expr, const std::vector<Bounds>& box);
/// True when some point of the box satisfies the condition.
bool satisfiable_in(const LinearCondition& cond, const std::vector<Bounds>& box);

std::vector<int> applicable_snaps(const Problem& problem, const SearchState& state);
SearchState successor(const Problem& problem, const std::shared_ptr<const SearchState>& parent, int snap,
                      double epsilon);

/// Propositional goals hold and no action is left open.
bool goal_candidate(const Problem& problem, const SearchState& state);
Plan build_plan(const Problem& problem, const SearchState& state, const std::vector<double>& step_times);

enum class SearchStatus { PlanFound, NoPlan, ResourceLimit };

const char* to_string(SearchStatus s);

struct SearchResult {
  SearchStatus status = SearchStatus::NoPlan;
  std::optional<Plan> plan;
  StatsSnapshot stats;
  double wall_seconds = 0.0;
};

struct SearchHooks {
  // Called with every program solved for a feasibility verdict.
  std::function<void(const LinearProgram&)> on_feasibility_lp;
};

SearchResult wa_star(const Problem& problem, const StrategyConfig& config, const SearchHooks& hooks = {});

}  // namespace tnplan
