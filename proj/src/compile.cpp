#include "tnplan/compile.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tnplan {

const char* to_string(ActionClass c) {
  switch (c) {
    case ActionClass::PropositionalTemporalOnly: return "PropositionalTemporalOnly";
    case ActionClass::NumericConstraintsOnly: return "NumericConstraintsOnly";
    case ActionClass::InstantNumericEffect: return "InstantNumericEffect";
    case ActionClass::ContinuousRateChange: return "ContinuousRateChange";
  }
  return "?";
}

const char* to_string(RowKind k) {
  switch (k) {
    case RowKind::Origin: return "origin";
    case RowKind::Order: return "order";
    case RowKind::Duration: return "duration";
    case RowKind::ValueBefore: return "value-before";
    case RowKind::ValueAfter: return "value-after";
    case RowKind::Precondition: return "precondition";
    case RowKind::Invariant: return "invariant";
    case RowKind::Goal: return "goal";
    case RowKind::NowOrder: return "now-order";
    case RowKind::NowWindow: return "now-window";
    case RowKind::ValueNow: return "value-now";
    case RowKind::OpenEnd: return "open-end";
  }
  return "?";
}

const char* to_string(Decider d) {
  switch (d) {
    case Decider::Stn: return "stn";
    case Decider::LatestAction: return "latest-action";
    case Decider::Conversion: return "conversion";
    case Decider::Lp: return "lp";
  }
  return "?";
}

const char* to_string(BoundStrategy s) {
  switch (s) {
    case BoundStrategy::NoUpdateNeeded: return "NoUpdateNeeded";
    case BoundStrategy::ClosedForm: return "ClosedForm";
    case BoundStrategy::LpWithInheritedBounds: return "LpWithInheritedBounds";
    case BoundStrategy::LpUnbounded: return "LpUnbounded";
  }
  return "?";
}

ActionClass classify_latest(const SnapAction& snap) {
  if (!snap.started_rates.empty() || !snap.ended_rates.empty()) return ActionClass::ContinuousRateChange;
  if (!snap.effects.numeric.empty()) return ActionClass::InstantNumericEffect;
  if (snap.has_numeric_conditions() || !snap.touched.empty()) return ActionClass::NumericConstraintsOnly;
  return ActionClass::PropositionalTemporalOnly;
}

StatsSnapshot SearchStats::snapshot() const {
  return {states_expanded.load(), stn_only_decisions.load(), conversions.load(), lp_feasibility_calls.load(),
          lp_optimize_calls.load()};
}

namespace {

constexpr double kRateZero = 1e-12;

Affine constant(double c) { return {c, {}}; }
Affine time_at(int node) { return {0.0, {{node, 1.0}}}; }

// a + scale * b
Affine combine(const Affine& a, const Affine& b, double scale) {
  Affine out{a.constant + scale * b.constant, {}};
  std::size_t i = 0, j = 0;
  auto push = [&out](int node, double c) {
    if (std::abs(c) > 1e-12) out.terms.push_back({node, c});
  };
  while (i < a.terms.size() || j < b.terms.size()) {
    if (j == b.terms.size() || (i < a.terms.size() && a.terms[i].first < b.terms[j].first)) {
      push(a.terms[i].first, a.terms[i].second);
      ++i;
    } else if (i == a.terms.size() || b.terms[j].first < a.terms[i].first) {
      push(b.terms[j].first, scale * b.terms[j].second);
      ++j;
    } else {
      push(a.terms[i].first, a.terms[i].second + scale * b.terms[j].second);
      ++i;
      ++j;
    }
  }
  return out;
}

// value + rate * (t_to - t_from)
Affine advance(const Affine& value, double rate, int from_node, int to_node) {
  if (std::abs(rate) <= kRateZero) return value;
  Affine d = combine(time_at(to_node), from_node == Stn::kZero ? constant(0.0) : time_at(from_node), -1.0);
  return combine(value, d, rate);
}

std::string lp_name(std::string s) {
  std::replace(s.begin(), s.end(), ' ', '_');
  return s;
}

std::string describe(const Problem& problem, const LinearCondition& c) {
  std::ostringstream os;
  os.precision(10);
  for (std::size_t i = 0; i < c.terms.size(); ++i) {
    const auto& t = c.terms[i];
    if (i > 0) os << (t.weight < 0 ? " - " : " + ");
    else if (t.weight < 0) os << "-";
    if (std::abs(t.weight) != 1.0) os << std::abs(t.weight) << "*";
    os << "(" << problem.variables()[t.var] << ")";
  }
  if (c.terms.empty()) os << "0";
  os << " " << to_string(c.cmp) << " " << c.constant;
  return os.str();
}

const char* snap_suffix(SnapKind k) {
  switch (k) {
    case SnapKind::Start: return " start";
    case SnapKind::End: return " end";
    case SnapKind::Instantaneous: return "";
  }
  return "";
}

bool contains(const std::vector<VarId>& sorted, VarId v) { return std::binary_search(sorted.begin(), sorted.end(), v); }

class Compiler {
 public:
  Compiler(const Problem& problem, const SearchState& state, Formulation form, double epsilon)
      : problem_(problem), state_(state), form_(form), eps_(epsilon) {}

  CompiledState run(bool include_goal) {
    const int nv = problem_.num_variables();
    const auto& init = problem_.initial().assignments;
    last_.assign(nv, -1);
    last_after_.assign(nv, -1);
    anchor_after_.assign(nv, -1);
    rate_.assign(nv, 0.0);
    after_sym_.resize(nv);
    for (int v = 0; v < nv; ++v) after_sym_[v] = constant(init[v]);
    out_.anchors.assign(nv, {});
    for (int v = 0; v < nv; ++v) out_.anchors[v].value = init[v];
    open_start_.assign(problem_.num_actions(), -1);

    for (int k = 0; k < static_cast<int>(state_.steps.size()); ++k) compile_step(k);
    finish_now();
    add_open_ends();
    out_.target.assign(nv, -1);
    out_.target_constant.assign(nv, 0.0);
    for (int v = 0; v < nv; ++v) {
      if (now_value_[v] >= 0) out_.target[v] = now_value_[v];
      else if (last_[v] >= 0) out_.target[v] = last_after_[v];
      else out_.target_constant[v] = init[v];
    }
    if (include_goal) add_goal_rows();
    return std::move(out_);
  }

 private:
  int new_var(const std::string& name, Affine sym) {
    out_.symbolic.push_back(std::move(sym));
    return out_.lp.add_variable(name);
  }

  void row(LinearCondition c, RowKind kind, std::string label = {}) {
    out_.lp.add_constraint(std::move(c), label.empty() ? to_string(kind) : std::move(label));
    out_.row_kinds.push_back(kind);
  }

  void condition_row(const LinearCondition& c, const std::vector<int>& lp_of, RowKind kind, int step,
                     const std::string& what) {
    LinearCondition r{{}, c.cmp, c.constant};
    for (const auto& t : c.terms) {
      if (lp_of[t.var] < 0) throw ModelError("condition on an untracked variable");
      r.terms.push_back({t.weight, lp_of[t.var]});
    }
    out_.conditions.push_back({static_cast<int>(out_.lp.constraints().size()), step, what + ": " + describe(problem_, c)});
    row(std::move(r), kind);
  }

  // Row for lhs_var = base_var + rate * (t_lhs - t_base), or lhs_var = init when base < 0.
  void value_row(int lhs_var, VarId v, int base_step, int base_var, int lhs_time, RowKind kind) {
    if (base_step < 0) {
      row({{{1.0, lhs_var}}, Cmp::Eq, problem_.initial().assignments[v]}, kind);
      return;
    }
    LinearCondition r{{{1.0, lhs_var}, {-1.0, base_var}}, Cmp::Eq, 0.0};
    double rate = rate_[v];
    if (std::abs(rate) > kRateZero) {
      r.terms.push_back({-rate, lhs_time});
      r.terms.push_back({rate, out_.time_var[base_step]});
    }
    row(std::move(r), kind);
  }

  void compile_step(int k) {
    const Step& step = state_.steps[k];
    const SnapAction& snap = problem_.snap(step.snap);
    const int node = SearchState::node_of(k);
    const std::string label = problem_.actions()[snap.action].name + snap_suffix(snap.end);

    int t = new_var("t" + std::to_string(k), time_at(node));
    out_.time_var.push_back(t);
    if (step.after.empty() && step.start_step < 0) row({{{1.0, t}}, Cmp::GreaterEq, 0.0}, RowKind::Origin);
    for (int p : step.after) row({{{1.0, t}, {-1.0, out_.time_var[p]}}, Cmp::GreaterEq, eps_}, RowKind::Order);
    if (step.start_step >= 0) {
      int ts = out_.time_var[step.start_step];
      row({{{1.0, t}, {-1.0, ts}}, Cmp::GreaterEq, step.window.min}, RowKind::Duration);
      if (std::isfinite(step.window.max))
        row({{{1.0, t}, {-1.0, ts}}, Cmp::LessEq, step.window.max}, RowKind::Duration);
    }
    if (snap.started_rates.size() + snap.ended_rates.size() > 0) out_.has_rates = true;

    const int nv = problem_.num_variables();
    std::vector<int> before(nv, -1), after(nv, -1);
    std::vector<Affine> before_sym(nv);
    const std::string suffix = "_" + std::to_string(k);
    for (VarId v : step.touched) {
      const std::string name = lp_name(problem_.variables()[v]) + suffix;
      before_sym[v] = last_[v] < 0 ? after_sym_[v]
                                   : advance(after_sym_[v], rate_[v], SearchState::node_of(last_[v]), node);
      before[v] = new_var(name, before_sym[v]);
      if (form_ == Formulation::Baseline) value_row(before[v], v, last_[v], last_after_[v], t, RowKind::ValueBefore);
      else value_row(before[v], v, out_.anchors[v].step, anchor_after_[v], t, RowKind::ValueBefore);
    }
    for (VarId v : step.touched) {
      const std::string name = lp_name(problem_.variables()[v]) + suffix + "'";
      const InstantEffect* assign = nullptr;
      for (const auto& e : snap.effects.numeric) {
        if (e.target != v || e.mode != EffectMode::Assign) continue;
        if (assign) throw ModelError("two assignments to one variable in " + label);
        assign = &e;
      }
      // v' - sum(expression terms) = constants
      LinearCondition r{{}, Cmp::Eq, 0.0};
      Affine sym;
      auto add_expr = [&](const LinearExpr& expr, double sign) {
        r.constant += sign * expr.constant;
        sym = combine(sym, constant(expr.constant), sign);
        for (const auto& term : expr.terms) {
          if (before[term.var] < 0) throw ModelError("effect reads an untracked variable in " + label);
          r.terms.push_back({-sign * term.weight, before[term.var]});
          sym = combine(sym, before_sym[term.var], sign * term.weight);
        }
      };
      if (assign) {
        add_expr(assign->expression, 1.0);
      } else {
        r.terms.push_back({-1.0, before[v]});
        sym = before_sym[v];
      }
      for (const auto& e : snap.effects.numeric) {
        if (e.target != v || e.mode == EffectMode::Assign) continue;
        add_expr(e.expression, e.mode == EffectMode::Increase ? 1.0 : -1.0);
      }
      after[v] = new_var(name, sym);
      r.terms.insert(r.terms.begin(), {1.0, after[v]});
      row(std::move(r), RowKind::ValueAfter);
    }
    for (VarId v : step.touched) {
      const double new_rate = rate_after(snap, v, rate_[v]);
      if (snap.changes_rate_of(v) || snap.instant_effect_on(v)) {
        auto& a = out_.anchors[v];
        a.step = k;
        a.known_value = out_.symbolic[after[v]].terms.empty();
        a.value = out_.symbolic[after[v]].constant;
        a.rate_after = new_rate;
        anchor_after_[v] = after[v];
      }
      last_[v] = k;
      last_after_[v] = after[v];
      after_sym_[v] = out_.symbolic[after[v]];
      rate_[v] = new_rate;
    }

    auto vars_of = [](const LinearCondition& c) {
      std::vector<VarId> vs;
      for (const auto& term : c.terms) vs.push_back(term.var);
      return vs;
    };
    for (const auto& c : snap.preconditions.numeric) {
      condition_row(c, before, RowKind::Precondition, k, "precondition of " + label);
      auto vs = vars_of(c);
      bool changed = std::any_of(vs.begin(), vs.end(), [&](VarId v) { return snap.instant_effect_on(v); });
      if (!changed) condition_row(c, after, RowKind::Precondition, k, "precondition of " + label);
    }
    if (snap.end == SnapKind::Start)
      for (const auto& c : snap.invariants.numeric)
        condition_row(c, after, RowKind::Invariant, k, "invariant of " + label);
    if (snap.end == SnapKind::End)
      for (const auto& c : snap.invariants.numeric)
        condition_row(c, before, RowKind::Invariant, k, "invariant of " + label);
    for (int a = 0; a < problem_.num_actions(); ++a) {
      if (open_start_[a] < 0 || a == snap.action) continue;
      const auto& action = problem_.actions()[a];
      for (const auto& c : action.invariants.numeric) {
        auto vs = vars_of(c);
        if (!std::all_of(vs.begin(), vs.end(), [&](VarId v) { return contains(step.touched, v); })) continue;
        const std::string what = "invariant of " + action.name + " at step " + std::to_string(k);
        condition_row(c, before, RowKind::Invariant, k, what);
        condition_row(c, after, RowKind::Invariant, k, what);
      }
    }
    if (snap.end == SnapKind::Start) open_start_[snap.action] = k;
    if (snap.end == SnapKind::End) open_start_[snap.action] = -1;
  }

  void finish_now() {
    const int nv = problem_.num_variables();
    out_.stn = state_.stn;
    out_.now_node.assign(nv, -1);
    out_.now_var.assign(nv, -1);
    now_value_.assign(nv, -1);
    for (VarId v = 0; v < nv; ++v) {
      if (std::abs(rate_[v]) <= kRateZero || last_[v] < 0) continue;
      const std::string vname = lp_name(problem_.variables()[v]);
      const int node = out_.stn.add_node();
      const int tnow = new_var("t_now_" + vname, time_at(node));
      out_.now_node[v] = node;
      out_.now_var[v] = tnow;
      for (int k = 0; k < static_cast<int>(state_.steps.size()); ++k) {
        if (!contains(state_.steps[k].touched, v)) continue;
        row({{{1.0, tnow}, {-1.0, out_.time_var[k]}}, Cmp::GreaterEq, eps_}, RowKind::NowOrder);
        out_.stn.add_constraint(SearchState::node_of(k), node, eps_, kInf);
      }
      for (int a = 0; a < problem_.num_actions(); ++a) {
        if (open_start_[a] < 0) continue;
        const auto& action = problem_.actions()[a];
        bool acts = std::any_of(action.continuous.begin(), action.continuous.end(),
                                [v](const ContinuousEffect& e) { return e.target == v; });
        double dmax = action.duration_window(kStrictMargin).max;
        if (!acts || !std::isfinite(dmax)) continue;
        row({{{1.0, tnow}, {-1.0, out_.time_var[open_start_[a]]}}, Cmp::LessEq, dmax}, RowKind::NowWindow);
        out_.stn.add_constraint(SearchState::node_of(open_start_[a]), node, -kInf, dmax);
      }
      Affine sym = advance(after_sym_[v], rate_[v], SearchState::node_of(last_[v]), node);
      const int value = new_var(vname + "_now", sym);
      if (form_ == Formulation::Baseline) value_row(value, v, last_[v], last_after_[v], tnow, RowKind::ValueNow);
      else value_row(value, v, out_.anchors[v].step, anchor_after_[v], tnow, RowKind::ValueNow);
      now_value_[v] = value;
    }
  }

  // An open action whose end deletes what another open action keeps over all
  // can only end after it.
  void add_open_ends() {
    const int na = problem_.num_actions();
    std::vector<int> end_node(na, -1), end_var(na, -1);
    auto ensure = [&](int a) {
      if (end_node[a] >= 0) return;
      const auto& action = problem_.actions()[a];
      const int node = out_.stn.add_node();
      end_node[a] = node;
      end_var[a] = new_var("t_end_" + lp_name(action.name), time_at(node));
      const DurationWindow w = action.duration_window(kStrictMargin);
      const int start = open_start_[a];
      row({{{1.0, end_var[a]}, {-1.0, out_.time_var[start]}}, Cmp::GreaterEq, w.min}, RowKind::OpenEnd);
      if (std::isfinite(w.max))
        row({{{1.0, end_var[a]}, {-1.0, out_.time_var[start]}}, Cmp::LessEq, w.max}, RowKind::OpenEnd);
      out_.stn.add_constraint(SearchState::node_of(start), node, w.min, w.max);
      out_.open_end_actions.push_back(a);
    };
    for (int b = 0; b < na; ++b) {
      if (open_start_[b] < 0) continue;
      const auto& deleted = problem_.snap(problem_.end_snap(b)).effects.del;
      if (deleted.empty()) continue;
      for (int a = 0; a < na; ++a) {
        if (a == b || open_start_[a] < 0) continue;
        const auto& kept = problem_.actions()[a].invariants.propositions;
        bool clash = std::any_of(kept.begin(), kept.end(), [&](PropId p) { return std::find(deleted.begin(), deleted.end(), p) != deleted.end(); });
        if (!clash) continue;
        ensure(a);
        ensure(b);
        row({{{1.0, end_var[b]}, {-1.0, end_var[a]}}, Cmp::GreaterEq, eps_}, RowKind::OpenEnd);
        out_.stn.add_constraint(end_node[a], end_node[b], eps_, kInf);
      }
    }
    std::sort(out_.open_end_actions.begin(), out_.open_end_actions.end());
  }

  void add_goal_rows() {
    for (const auto& c : problem_.goal().numeric_conditions) {
      LinearCondition r{{}, c.cmp, c.constant};
      for (const auto& t : c.terms) {
        if (out_.target[t.var] >= 0) r.terms.push_back({t.weight, out_.target[t.var]});
        else r.constant -= t.weight * out_.target_constant[t.var];
      }
      out_.conditions.push_back({static_cast<int>(out_.lp.constraints().size()), -1, "goal: " + describe(problem_, c)});
      row(std::move(r), RowKind::Goal);
    }
  }

  const Problem& problem_;
  const SearchState& state_;
  Formulation form_;
  double eps_;
  CompiledState out_;
  std::vector<int> last_, last_after_, anchor_after_, open_start_, now_value_;
  std::vector<double> rate_;
  std::vector<Affine> after_sym_;
};

// Mirrors LinearProgram::satisfied_by for a row whose left side is a constant.
bool constant_row_holds(double lhs, Cmp cmp, double rhs) {
  const double tol = kLpTolerance * (1.0 + std::abs(rhs));
  switch (cmp) {
    case Cmp::Less: return lhs <= rhs - kStrictMargin + tol;
    case Cmp::LessEq: return lhs <= rhs + tol;
    case Cmp::Eq: return std::abs(lhs - rhs) <= tol;
    case Cmp::GreaterEq: return lhs >= rhs - tol;
    case Cmp::Greater: return lhs >= rhs + kStrictMargin - tol;
  }
  return false;
}

// k * (t_y - t_x) with k > 0, when the two terms cancel.
bool difference_of(const Affine& a, int& x, int& y, double& k) {
  if (a.terms.size() != 2 || std::abs(a.terms[0].second + a.terms[1].second) > 1e-12) return false;
  const bool first_positive = a.terms[0].second > 0;
  y = a.terms[first_positive ? 0 : 1].first;
  x = a.terms[first_positive ? 1 : 0].first;
  k = std::abs(a.terms[0].second);
  return true;
}

// Range of an affine form in `net`, when it is a constant or one scaled difference.
std::optional<Bounds> closed_form(const Affine& a, const Stn& net) {
  if (a.terms.empty()) return Bounds{a.constant, a.constant};
  int x = Stn::kZero, y = -1;
  double k = 0.0;
  if (a.terms.size() == 1) {
    y = a.terms[0].first;
    k = a.terms[0].second;
  } else if (!difference_of(a, x, y, k)) {
    return std::nullopt;
  }
  double lo = a.constant + k * net.min_difference(x, y);
  double hi = a.constant + k * net.max_difference(x, y);
  if (k < 0) std::swap(lo, hi);
  return Bounds{lo, hi};
}

}  // namespace

double rate_after(const SnapAction& snap, VarId v, double rate) {
  for (const auto& e : snap.ended_rates) {
    if (e.target != v) continue;
    rate = e.mode == RateMode::AssignRate ? 0.0 : rate - e.signed_rate();
  }
  for (const auto& e : snap.started_rates) {
    if (e.target != v) continue;
    if (e.mode == RateMode::AssignRate) {
      if (std::abs(rate) > 1e-12)
        throw ModelError("assign-rate effect combined with other continuous effects on one variable");
      rate = e.rate;
    } else {
      rate += e.signed_rate();
    }
  }
  return rate;
}

CompiledState compile_state(const Problem& problem, const SearchState& state, Formulation form, double epsilon,
                            bool include_goal) {
  return Compiler(problem, state, form, epsilon).run(include_goal);
}

Conversion try_convert_to_temporal(const CompiledState& compiled) {
  Conversion out;
  const auto& rows = compiled.lp.constraints();
  for (const auto& cr : compiled.conditions) {
    const auto& row = rows[cr.row];
    if (row.terms.size() > 1) {
      out.blocking.push_back(cr.description + " (several variables)");
      continue;
    }
    Affine a;
    for (const auto& t : row.terms) a = combine(a, compiled.symbolic[t.var], t.weight);
    Cmp cmp = row.cmp;
    double rhs = row.constant;
    if (cmp == Cmp::Less) { cmp = Cmp::LessEq; rhs -= kStrictMargin; }
    if (cmp == Cmp::Greater) { cmp = Cmp::GreaterEq; rhs += kStrictMargin; }
    if (a.terms.empty()) {
      if (!constant_row_holds(a.constant, row.cmp, row.constant)) {
        out.kind = Conversion::Kind::Inconsistent;
        out.blocking = {cr.description};
        out.constraints.clear();
        return out;
      }
      continue;
    }
    int x = Stn::kZero, y = -1;
    double k = 0.0;
    if (a.terms.size() == 1) {
      y = a.terms[0].first;
      k = a.terms[0].second;
    } else if (!difference_of(a, x, y, k)) {
      out.blocking.push_back(cr.description + " (value depends on several intervals)");
      continue;
    }
    // k * (t_y - t_x) cmp rhs - c
    const double bound = (rhs - a.constant) / k;
    if (k < 0) cmp = flipped(cmp);
    StnConstraint c{x, y, -kInf, kInf};
    if (cmp == Cmp::LessEq || cmp == Cmp::Eq) c.ub = bound;
    if (cmp == Cmp::GreaterEq || cmp == Cmp::Eq) c.lb = bound;
    out.constraints.push_back(c);
  }
  if (!out.blocking.empty()) {
    out.kind = Conversion::Kind::NotConvertible;
    out.constraints.clear();
  }
  return out;
}

ConsistencyResult check_state_consistency(const Problem& problem, const SearchState& state,
                                          const StrategyConfig& config, SearchStats& stats) {
  ConsistencyResult res;
  const Formulation form = config.reformulate ? Formulation::Reformulated : Formulation::Baseline;
  CompiledState compiled = compile_state(problem, state, form, config.epsilon);
  res.network = compiled.stn;
  if (!res.network.consistent()) {
    ++stats.stn_only_decisions;
    res.consistent = false;
    res.decided_by = Decider::Stn;
    return res;
  }
  const int latest = state.latest_snap();
  if (latest < 0) {
    res.consistent = true;
    res.decided_by = Decider::Stn;
    res.compiled = std::move(compiled);
    return res;
  }
  const SnapAction& snap = problem.snap(latest);
  const auto& tied = compiled.open_end_actions;
  if (config.latest_action && snap.end != SnapKind::End &&
      classify_latest(snap) == ActionClass::PropositionalTemporalOnly &&
      !std::binary_search(tied.begin(), tied.end(), snap.action)) {
    ++stats.stn_only_decisions;
    res.consistent = true;
    res.decided_by = Decider::LatestAction;
    return res;
  }
  if (config.reformulate) {
    Conversion conv = try_convert_to_temporal(compiled);
    if (conv.kind == Conversion::Kind::Inconsistent) {
      ++stats.conversions;
      res.consistent = false;
      res.decided_by = Decider::Conversion;
      res.conversion = std::move(conv);
      return res;
    }
    if (conv.kind == Conversion::Kind::Converted) {
      ++stats.conversions;
      bool ok = true;
      try {
        for (const auto& c : conv.constraints) res.network.add_constraint(c);
      } catch (const InconsistentConstraint&) {
        ok = false;
      }
      res.consistent = ok && res.network.consistent();
      res.decided_by = Decider::Conversion;
      res.conversion = std::move(conv);
      res.compiled = std::move(compiled);
      return res;
    }
    res.conversion = std::move(conv);
  }
  if (compiled.conditions.empty()) {
    ++stats.stn_only_decisions;
    res.consistent = true;
    res.decided_by = Decider::Stn;
    res.compiled = std::move(compiled);
    return res;
  }
  ++stats.lp_feasibility_calls;
  LpOutcome lp = solve_feasibility(compiled.lp);
  res.consistent = lp.status == LpStatus::Feasible;
  res.decided_by = Decider::Lp;
  res.lp_point = std::move(lp.point);
  res.compiled = std::move(compiled);
  return res;
}

std::vector<Bounds> update_bounds(const Problem& problem, const SearchState& state,
                                  const std::vector<Bounds>* parent_bounds, const ConsistencyResult& check,
                                  const StrategyConfig& config, SearchStats& stats,
                                  std::vector<BoundStrategy>* chosen) {
  const int nv = problem.num_variables();
  std::vector<Bounds> out(nv);
  std::vector<BoundStrategy> strategy(nv, BoundStrategy::NoUpdateNeeded);
  if (!check.consistent) throw std::logic_error("bound update on an inconsistent state");

  if (check.decided_by == Decider::LatestAction) {
    if (!parent_bounds) throw std::logic_error("inherited bounds need the parent's bounds");
    out = *parent_bounds;
    if (chosen) *chosen = strategy;
    return out;
  }

  const Formulation form = config.reformulate ? Formulation::Reformulated : Formulation::Baseline;
  std::optional<CompiledState> local;
  if (!check.compiled) local = compile_state(problem, state, form, config.epsilon);
  const CompiledState& compiled = check.compiled ? *check.compiled : *local;
  const bool converted = config.reformulate && check.decided_by == Decider::Conversion;
  const int latest = state.latest_snap();

  for (VarId v = 0; v < nv; ++v) {
    const int target = compiled.target[v];
    if (target < 0) {
      out[v] = {compiled.target_constant[v], compiled.target_constant[v]};
      continue;
    }
    if (converted) {
      if (auto cf = closed_form(compiled.symbolic[target], check.network)) {
        out[v] = *cf;
        strategy[v] = BoundStrategy::ClosedForm;
        continue;
      }
    }
    bool inherit = config.bound_hints && parent_bounds && latest >= 0 &&
                   !problem.snap(latest).changes_rate_of(v) && !problem.snap(latest).instant_effect_on(v);
    LinearProgram lp = compiled.lp;
    // Widened by the solver tolerance so rounding in the parent's optima
    // cannot cut off the child's.
    if (inherit)
      lp.set_hint(target, std::min((*parent_bounds)[v].min, (*parent_bounds)[v].max) - kLpTolerance,
                  std::max((*parent_bounds)[v].min, (*parent_bounds)[v].max) + kLpTolerance);
    strategy[v] = inherit ? BoundStrategy::LpWithInheritedBounds : BoundStrategy::LpUnbounded;
    auto solve = [&](ObjectiveSense sense) {
      lp.set_objective(sense, target);
      ++stats.lp_optimize_calls;
      return optimize(lp);
    };
    LpOutcome lo = solve(ObjectiveSense::Minimize);
    LpOutcome hi = solve(ObjectiveSense::Maximize);
    if (lo.status == LpStatus::Infeasible || hi.status == LpStatus::Infeasible)
      throw LpError("bound program infeasible on a state judged consistent");
    out[v] = {std::min(lo.value, hi.value), std::max(lo.value, hi.value)};
  }
  if (chosen) *chosen = strategy;
  return out;
}

std::optional<std::vector<double>> schedule_goal_state(const Problem& problem, const SearchState& state,
                                                       const StrategyConfig& config, SearchStats& stats) {
  const Formulation form = config.reformulate ? Formulation::Reformulated : Formulation::Baseline;
  CompiledState compiled = compile_state(problem, state, form, config.epsilon, /*include_goal=*/true);
  Stn net = compiled.stn;
  if (!net.consistent()) return std::nullopt;
  const int n = static_cast<int>(state.steps.size());
  auto from_network = [&](const Stn& s) -> std::optional<std::vector<double>> {
    if (!s.consistent()) return std::nullopt;
    auto schedule = s.check_consistency().schedule;
    std::vector<double> times(n);
    for (int k = 0; k < n; ++k) times[k] = schedule[SearchState::node_of(k)];
    return times;
  };
  if (config.reformulate) {
    Conversion conv = try_convert_to_temporal(compiled);
    if (conv.kind == Conversion::Kind::Inconsistent) return std::nullopt;
    if (conv.kind == Conversion::Kind::Converted) {
      ++stats.conversions;
      try {
        for (const auto& c : conv.constraints) net.add_constraint(c);
      } catch (const InconsistentConstraint&) {
        return std::nullopt;
      }
      return from_network(net);
    }
  }
  if (compiled.conditions.empty()) return from_network(net);
  ++stats.lp_feasibility_calls;
  LpOutcome lp = solve_feasibility(compiled.lp);
  if (lp.status != LpStatus::Feasible) return std::nullopt;
  std::vector<double> times(n);
  for (int k = 0; k < n; ++k) times[k] = lp.point[compiled.time_var[k]];
  return times;
}

}  // namespace tnplan
