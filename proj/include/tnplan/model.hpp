#pragma once

// Ground temporal-numeric planning model: propositions, numeric variables,
// durative actions and their snap-action decomposition.

#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tnplan {

using PropId = int;
using VarId = int;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kEqualityTolerance = 1e-9;
inline constexpr double kDefaultEpsilon = 0.001;

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Cmp { Less, LessEq, Eq, GreaterEq, Greater };

const char* to_string(Cmp cmp);
// Comparator obtained by multiplying both sides by a negative number.
Cmp flipped(Cmp cmp);

struct Term {
  double weight = 0.0;
  VarId var = -1;
  friend bool operator==(const Term&, const Term&) = default;
};

struct LinearExpr {
  std::vector<Term> terms;
  double constant = 0.0;
  friend bool operator==(const LinearExpr&, const LinearExpr&) = default;
};

/// sum(weight * var) <cmp> constant
struct LinearCondition {
  std::vector<Term> terms;
  Cmp cmp = Cmp::LessEq;
  double constant = 0.0;

  bool mentions(VarId v) const;
  bool single_variable() const { return terms.size() == 1; }
  friend bool operator==(const LinearCondition&, const LinearCondition&) = default;
};

enum class EffectMode { Increase, Assign, Decrease };

struct InstantEffect {
  VarId target = -1;
  EffectMode mode = EffectMode::Assign;
  LinearExpr expression;
  friend bool operator==(const InstantEffect&, const InstantEffect&) = default;
};

enum class RateMode { Increase, AssignRate, Decrease };

/// dv/dt {+=, =, -=} rate
struct ContinuousEffect {
  VarId target = -1;
  RateMode mode = RateMode::Increase;
  double rate = 0.0;

  double signed_rate() const { return mode == RateMode::Decrease ? -rate : rate; }
  friend bool operator==(const ContinuousEffect&, const ContinuousEffect&) = default;
};

struct ConditionSet {
  std::vector<PropId> propositions;
  std::vector<LinearCondition> numeric;

  bool empty() const { return propositions.empty() && numeric.empty(); }
  friend bool operator==(const ConditionSet&, const ConditionSet&) = default;
};

struct EffectSet {
  std::vector<PropId> add;
  std::vector<PropId> del;
  std::vector<InstantEffect> numeric;

  bool empty() const { return add.empty() && del.empty() && numeric.empty(); }
  friend bool operator==(const EffectSet&, const EffectSet&) = default;
};

/// ?duration <cmp> value
struct DurationConstraint {
  Cmp cmp = Cmp::Eq;
  double value = 0.0;
  friend bool operator==(const DurationConstraint&, const DurationConstraint&) = default;
};

struct DurationWindow {
  double min = 0.0;
  double max = kInf;
};

struct DurativeAction {
  std::string name;
  bool instantaneous = false;
  std::vector<DurationConstraint> duration;
  ConditionSet pre_start;
  ConditionSet invariants;
  ConditionSet pre_end;
  EffectSet eff_start;
  EffectSet eff_end;
  std::vector<ContinuousEffect> continuous;

  /// Feasible duration interval; strict bounds are tightened by `strict_margin`.
  DurationWindow duration_window(double strict_margin = 1e-6) const;
  friend bool operator==(const DurativeAction&, const DurativeAction&) = default;
};

enum class SnapKind { Start, End, Instantaneous };

struct SnapAction {
  int action = -1;
  std::string parent;
  SnapKind end = SnapKind::Instantaneous;
  ConditionSet preconditions;
  // Over-all obligations of the parent action, attached to both snaps.
  ConditionSet invariants;
  EffectSet effects;
  std::vector<ContinuousEffect> started_rates;
  std::vector<ContinuousEffect> ended_rates;
  // Numeric variables the parent action reads or writes anywhere (sorted).
  std::vector<VarId> touched;

  bool has_numeric_conditions() const;
  bool changes_rate_of(VarId v) const;
  bool instant_effect_on(VarId v) const;
};

struct InitialState {
  std::vector<PropId> true_propositions;
  std::vector<double> assignments;  // indexed by VarId
  friend bool operator==(const InitialState&, const InitialState&) = default;
};

struct Goal {
  std::vector<PropId> propositions;
  std::vector<LinearCondition> numeric_conditions;
  bool empty() const { return propositions.empty() && numeric_conditions.empty(); }
  friend bool operator==(const Goal&, const Goal&) = default;
};

/// One timestamped action occurrence.
struct PlanStep {
  std::string action;
  double time = 0.0;
  double duration = 0.0;  // unused when instantaneous
  bool instantaneous = false;
  friend bool operator==(const PlanStep&, const PlanStep&) = default;
};

struct Plan {
  std::vector<PlanStep> steps;
  friend bool operator==(const Plan&, const Plan&) = default;
};

/// Split a durative action into its start and end snaps.
std::pair<SnapAction, SnapAction> split_durative(const DurativeAction& action, int index = -1);
SnapAction instantaneous_snap(const DurativeAction& action, int index = -1);

/// Truth of a linear comparison. Equality uses kEqualityTolerance; strict
/// comparators are strict. Throws ModelError on a variable outside `values`.
bool evaluate_condition(const LinearCondition& cond, std::span<const double> values);
double evaluate(const LinearExpr& expr, std::span<const double> values);

/// Immutable planning problem <P, V, I, G> plus its snap-action set.
class Problem {
 public:
  Problem() = default;
  Problem(std::vector<std::string> propositions, std::vector<std::string> variables,
          std::vector<DurativeAction> actions, InitialState initial, Goal goal);

  const std::vector<std::string>& propositions() const { return propositions_; }
  const std::vector<std::string>& variables() const { return variables_; }
  const std::vector<DurativeAction>& actions() const { return actions_; }
  const InitialState& initial() const { return initial_; }
  const Goal& goal() const { return goal_; }

  int num_propositions() const { return static_cast<int>(propositions_.size()); }
  int num_variables() const { return static_cast<int>(variables_.size()); }
  int num_actions() const { return static_cast<int>(actions_.size()); }

  const std::vector<SnapAction>& snaps() const { return snaps_; }
  const SnapAction& snap(int id) const { return snaps_.at(id); }
  int start_snap(int action) const { return first_snap_.at(action); }
  int end_snap(int action) const;

  int find_action(const std::string& name) const;
  int find_proposition(const std::string& name) const;
  int find_variable(const std::string& name) const;

  friend bool operator==(const Problem& a, const Problem& b) {
    return a.propositions_ == b.propositions_ && a.variables_ == b.variables_ &&
           a.actions_ == b.actions_ && a.initial_ == b.initial_ && a.goal_ == b.goal_;
  }

 private:
  void validate() const;

  std::vector<std::string> propositions_;
  std::vector<std::string> variables_;
  std::vector<DurativeAction> actions_;
  InitialState initial_;
  Goal goal_;
  std::vector<SnapAction> snaps_;
  std::vector<int> first_snap_;
};

}  // namespace tnplan
