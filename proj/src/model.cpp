#include "tnplan/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

namespace tnplan {

const char* to_string(Cmp cmp) {
  switch (cmp) {
    case Cmp::Less: return "<";
    case Cmp::LessEq: return "<=";
    case Cmp::Eq: return "=";
    case Cmp::GreaterEq: return ">=";
    case Cmp::Greater: return ">";
  }
  return "?";
}

Cmp flipped(Cmp cmp) {
  switch (cmp) {
    case Cmp::Less: return Cmp::Greater;
    case Cmp::LessEq: return Cmp::GreaterEq;
    case Cmp::Eq: return Cmp::Eq;
    case Cmp::GreaterEq: return Cmp::LessEq;
    case Cmp::Greater: return Cmp::Less;
  }
  return cmp;
}

bool LinearCondition::mentions(VarId v) const {
  return std::any_of(terms.begin(), terms.end(), [v](const Term& t) { return t.var == v; });
}

DurationWindow DurativeAction::duration_window(double strict_margin) const {
  DurationWindow w;
  for (const auto& c : duration) {
    switch (c.cmp) {
      case Cmp::Eq: w.min = std::max(w.min, c.value); w.max = std::min(w.max, c.value); break;
      case Cmp::LessEq: w.max = std::min(w.max, c.value); break;
      case Cmp::Less: w.max = std::min(w.max, c.value - strict_margin); break;
      case Cmp::GreaterEq: w.min = std::max(w.min, c.value); break;
      case Cmp::Greater: w.min = std::max(w.min, c.value + strict_margin); break;
    }
  }
  return w;
}

bool SnapAction::has_numeric_conditions() const {
  return !preconditions.numeric.empty() || !invariants.numeric.empty();
}

bool SnapAction::changes_rate_of(VarId v) const {
  auto hit = [v](const ContinuousEffect& e) { return e.target == v; };
  return std::any_of(started_rates.begin(), started_rates.end(), hit) ||
         std::any_of(ended_rates.begin(), ended_rates.end(), hit);
}

bool SnapAction::instant_effect_on(VarId v) const {
  return std::any_of(effects.numeric.begin(), effects.numeric.end(),
                     [v](const InstantEffect& e) { return e.target == v; });
}

namespace {

void collect(const ConditionSet& c, std::set<VarId>& out) {
  for (const auto& cond : c.numeric)
    for (const auto& t : cond.terms) out.insert(t.var);
}

void collect(const EffectSet& e, std::set<VarId>& out) {
  for (const auto& eff : e.numeric) {
    out.insert(eff.target);
    for (const auto& t : eff.expression.terms) out.insert(t.var);
  }
}

std::vector<VarId> touched_by(const DurativeAction& a) {
  std::set<VarId> vars;
  collect(a.pre_start, vars);
  collect(a.invariants, vars);
  collect(a.pre_end, vars);
  collect(a.eff_start, vars);
  collect(a.eff_end, vars);
  for (const auto& c : a.continuous) vars.insert(c.target);
  return {vars.begin(), vars.end()};
}

}  // namespace

std::pair<SnapAction, SnapAction> split_durative(const DurativeAction& action, int index) {
  auto touched = touched_by(action);

  SnapAction start;
  start.action = index;
  start.parent = action.name;
  start.end = SnapKind::Start;
  start.preconditions = action.pre_start;
  start.invariants = action.invariants;
  start.effects = action.eff_start;
  start.started_rates = action.continuous;
  start.touched = touched;

  SnapAction end;
  end.action = index;
  end.parent = action.name;
  end.end = SnapKind::End;
  end.preconditions = action.pre_end;
  end.invariants = action.invariants;
  end.effects = action.eff_end;
  end.ended_rates = action.continuous;
  end.touched = std::move(touched);
  return {std::move(start), std::move(end)};
}

SnapAction instantaneous_snap(const DurativeAction& action, int index) {
  SnapAction s;
  s.action = index;
  s.parent = action.name;
  s.end = SnapKind::Instantaneous;
  s.preconditions = action.pre_start;
  s.effects = action.eff_start;
  s.touched = touched_by(action);
  return s;
}

double evaluate(const LinearExpr& expr, std::span<const double> values) {
  double sum = expr.constant;
  for (const auto& t : expr.terms) {
    if (t.var < 0 || static_cast<std::size_t>(t.var) >= values.size())
      throw ModelError("missing value for variable #" + std::to_string(t.var));
    sum += t.weight * values[t.var];
  }
  return sum;
}

bool evaluate_condition(const LinearCondition& cond, std::span<const double> values) {
  double lhs = evaluate(LinearExpr{cond.terms, 0.0}, values);
  double c = cond.constant;
  switch (cond.cmp) {
    case Cmp::Less: return lhs < c;
    case Cmp::LessEq: return lhs <= c + kEqualityTolerance;
    case Cmp::Eq: return std::abs(lhs - c) <= kEqualityTolerance;
    case Cmp::GreaterEq: return lhs >= c - kEqualityTolerance;
    case Cmp::Greater: return lhs > c;
  }
  return false;
}

Problem::Problem(std::vector<std::string> propositions, std::vector<std::string> variables,
                 std::vector<DurativeAction> actions, InitialState initial, Goal goal)
    : propositions_(std::move(propositions)),
      variables_(std::move(variables)),
      actions_(std::move(actions)),
      initial_(std::move(initial)),
      goal_(std::move(goal)) {
  validate();
  for (int a = 0; a < num_actions(); ++a) {
    first_snap_.push_back(static_cast<int>(snaps_.size()));
    if (actions_[a].instantaneous) {
      snaps_.push_back(instantaneous_snap(actions_[a], a));
    } else {
      auto [s, e] = split_durative(actions_[a], a);
      snaps_.push_back(std::move(s));
      snaps_.push_back(std::move(e));
    }
  }
}

int Problem::end_snap(int action) const {
  if (actions_.at(action).instantaneous) return -1;
  return first_snap_.at(action) + 1;
}

int Problem::find_action(const std::string& name) const {
  for (int i = 0; i < num_actions(); ++i)
    if (actions_[i].name == name) return i;
  return -1;
}

int Problem::find_proposition(const std::string& name) const {
  auto it = std::find(propositions_.begin(), propositions_.end(), name);
  return it == propositions_.end() ? -1 : static_cast<int>(it - propositions_.begin());
}

int Problem::find_variable(const std::string& name) const {
  auto it = std::find(variables_.begin(), variables_.end(), name);
  return it == variables_.end() ? -1 : static_cast<int>(it - variables_.begin());
}

void Problem::validate() const {
  const int np = num_propositions();
  const int nv = num_variables();
  auto check_prop = [&](PropId p, const std::string& where) {
    if (p < 0 || p >= np) throw ModelError("undeclared proposition #" + std::to_string(p) + " in " + where);
  };
  auto check_var = [&](VarId v, const std::string& where) {
    if (v < 0 || v >= nv) throw ModelError("undeclared variable #" + std::to_string(v) + " in " + where);
  };
  auto check_cond = [&](const LinearCondition& c, const std::string& where) {
    if (c.terms.empty()) throw ModelError("numeric condition without terms in " + where);
    std::unordered_set<VarId> seen;
    for (const auto& t : c.terms) {
      check_var(t.var, where);
      if (!seen.insert(t.var).second) throw ModelError("duplicate variable in condition in " + where);
    }
  };
  auto check_conds = [&](const ConditionSet& cs, const std::string& where) {
    for (PropId p : cs.propositions) check_prop(p, where);
    for (const auto& c : cs.numeric) check_cond(c, where);
  };
  auto check_effects = [&](const EffectSet& es, const std::string& where) {
    for (PropId p : es.add) check_prop(p, where);
    for (PropId p : es.del) {
      check_prop(p, where);
      if (std::find(es.add.begin(), es.add.end(), p) != es.add.end())
        throw ModelError("proposition both added and deleted in " + where);
    }
    for (const auto& e : es.numeric) {
      check_var(e.target, where);
      for (const auto& t : e.expression.terms) check_var(t.var, where);
    }
  };

  std::unordered_set<std::string> names;
  for (const auto& a : actions_) {
    if (!names.insert(a.name).second) throw ModelError("duplicate action name: " + a.name);
    check_conds(a.pre_start, a.name);
    check_conds(a.invariants, a.name);
    check_conds(a.pre_end, a.name);
    check_effects(a.eff_start, a.name);
    check_effects(a.eff_end, a.name);
    for (const auto& c : a.continuous) {
      check_var(c.target, a.name);
      if (!std::isfinite(c.rate)) throw ModelError("non-finite rate in " + a.name);
    }
    if (!a.instantaneous) {
      auto w = a.duration_window();
      if (w.min > w.max) throw ModelError("empty duration window in " + a.name);
    }
  }
  for (PropId p : initial_.true_propositions) check_prop(p, "initial state");
  if (static_cast<int>(initial_.assignments.size()) != nv)
    throw ModelError("initial state must assign every variable exactly once");
  for (PropId p : goal_.propositions) check_prop(p, "goal");
  for (const auto& c : goal_.numeric_conditions) check_cond(c, "goal");
}

}  // namespace tnplan
