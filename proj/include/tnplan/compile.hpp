#pragma once

// Compilation of a search state's partial plan into scheduling constraints,
// and the solver-selection logic that decides which solver checks it.

#include <atomic>
#include <optional>
#include <string>
#include <vector>

#include "tnplan/lp.hpp"
#include "tnplan/state.hpp"
#include "tnplan/strategy.hpp"

namespace tnplan {

enum class ActionClass { PropositionalTemporalOnly, NumericConstraintsOnly, InstantNumericEffect, ContinuousRateChange };

const char* to_string(ActionClass c);
ActionClass classify_latest(const SnapAction& snap);

/// Sum of active rates on `v` after applying `snap`, given the rate before it.
double rate_after(const SnapAction& snap, VarId v, double rate);

enum class Formulation { Baseline, Reformulated };

enum class RowKind { Origin, Order, Duration, ValueBefore, ValueAfter, Precondition, Invariant, Goal, NowOrder, NowWindow, ValueNow, OpenEnd };

const char* to_string(RowKind k);

/// constant + sum(coeff * t_node), over working-STN nodes.
struct Affine {
  double constant = 0.0;
  std::vector<std::pair<int, double>> terms;  // sorted by node, no zero coefficients
};

/// Last step that started or ended a rate on a variable, or applied an
/// instantaneous effect to it.
struct EffectAnchor {
  int step = -1;             // -1: the variable still holds its initial value
  bool known_value = true;   // value at the anchor is a constant
  double value = 0.0;        // when known
  double rate_after = 0.0;
};

struct ConditionRow {
  int row = -1;
  int step = -1;  // -1 for goal conditions
  std::string description;
};

struct CompiledState {
  LinearProgram lp;
  std::vector<RowKind> row_kinds;
  std::vector<Affine> symbolic;        // per LP variable
  std::vector<ConditionRow> conditions;
  std::vector<int> time_var;           // per step
  std::vector<int> now_node;           // per problem variable, -1 when not changing
  std::vector<int> now_var;            // per problem variable, LP time variable of its now node
  std::vector<int> target;             // per problem variable: LP variable bounded, or -1
  std::vector<double> target_constant; // when target is -1
  std::vector<EffectAnchor> anchors;   // per problem variable
  Stn stn;                             // state network plus now nodes
  // Open actions given a node for their future end, because the end of some
  // other open action deletes a proposition they keep over all.
  std::vector<int> open_end_actions;
  bool has_rates = false;
};

CompiledState compile_state(const Problem& problem, const SearchState& state, Formulation form,
                            double epsilon, bool include_goal = false);
inline CompiledState compile_baseline(const Problem& p, const SearchState& s, double epsilon) {
  return compile_state(p, s, Formulation::Baseline, epsilon);
}
inline CompiledState compile_reformulated(const Problem& p, const SearchState& s, double epsilon) {
  return compile_state(p, s, Formulation::Reformulated, epsilon);
}

struct Conversion {
  enum class Kind { Converted, NotConvertible, Inconsistent } kind = Kind::Converted;
  std::vector<StnConstraint> constraints;
  std::vector<std::string> blocking;
};

Conversion try_convert_to_temporal(const CompiledState& compiled);

struct StatsSnapshot {
  long states_expanded = 0;
  long stn_only_decisions = 0;
  long conversions = 0;
  long lp_feasibility_calls = 0;
  long lp_optimize_calls = 0;
  friend bool operator==(const StatsSnapshot&, const StatsSnapshot&) = default;
};

struct SearchStats {
  std::atomic<long> states_expanded{0};
  std::atomic<long> stn_only_decisions{0};
  std::atomic<long> conversions{0};
  std::atomic<long> lp_feasibility_calls{0};
  std::atomic<long> lp_optimize_calls{0};

  StatsSnapshot snapshot() const;
};

enum class Decider { Stn, LatestAction, Conversion, Lp };

const char* to_string(Decider d);

struct ConsistencyResult {
  bool consistent = false;
  Decider decided_by = Decider::Stn;
  std::optional<CompiledState> compiled;
  std::optional<Conversion> conversion;
  Stn network;                    // working network, converted constraints included
  std::vector<double> lp_point;   // when the LP decided
};

ConsistencyResult check_state_consistency(const Problem& problem, const SearchState& state,
                                          const StrategyConfig& config, SearchStats& stats);

enum class BoundStrategy { NoUpdateNeeded, ClosedForm, LpWithInheritedBounds, LpUnbounded };

const char* to_string(BoundStrategy s);

/// Bounds for a state judged consistent. `parent_bounds` may be null for the root.
std::vector<Bounds> update_bounds(const Problem& problem, const SearchState& state,
                                  const std::vector<Bounds>* parent_bounds, const ConsistencyResult& check,
                                  const StrategyConfig& config, SearchStats& stats,
                                  std::vector<BoundStrategy>* chosen = nullptr);

/// Goal check on a consistent state with no open actions: numeric goals must be
/// schedulable together with the plan. Returns the step timestamps when they are.
std::optional<std::vector<double>> schedule_goal_state(const Problem& problem, const SearchState& state,
                                                       const StrategyConfig& config, SearchStats& stats);

}  // namespace tnplan
