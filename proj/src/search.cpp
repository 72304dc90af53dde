#include "tnplan/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <set>

#include "tnplan/heuristic.hpp"

namespace tnplan {

int SearchState::num_open() const {
  return static_cast<int>(std::count_if(open.begin(), open.end(), [](int s) { return s >= 0; }));
}

SearchState initial_state(const Problem& problem) {
  SearchState s;
  s.props.assign(problem.num_propositions(), 0);
  for (PropId p : problem.initial().true_propositions) s.props[p] = 1;
  for (double v : problem.initial().assignments) s.bounds.push_back({v, v});
  s.rates.assign(problem.num_variables(), 0.0);
  s.open.assign(problem.num_actions(), -1);
  s.last_adder.assign(problem.num_propositions(), -1);
  s.last_deleter.assign(problem.num_propositions(), -1);
  s.readers.assign(problem.num_propositions(), {});
  s.last_toucher.assign(problem.num_variables(), -1);
  return s;
}

const char* to_string(SearchStatus s) {
  switch (s) {
    case SearchStatus::PlanFound: return "plan";
    case SearchStatus::NoPlan: return "no-plan";
    case SearchStatus::ResourceLimit: return "resource-limit";
  }
  return "?";
}

Bounds interval_of(const LinearExpr& expr, const std::vector<Bounds>& box) {
  Bounds r{expr.constant, expr.constant};
  for (const auto& t : expr.terms) {
    const Bounds& b = box[t.var];
    double lo = t.weight >= 0 ? t.weight * b.min : t.weight * b.max;
    double hi = t.weight >= 0 ? t.weight * b.max : t.weight * b.min;
    r.min += lo;
    r.max += hi;
  }
  return r;
}

bool satisfiable_in(const LinearCondition& cond, const std::vector<Bounds>& box) {
  Bounds lhs = interval_of(LinearExpr{cond.terms, 0.0}, box);
  const double c = cond.constant;
  switch (cond.cmp) {
    case Cmp::Less: return lhs.min < c;
    case Cmp::LessEq: return lhs.min <= c + kEqualityTolerance;
    case Cmp::Eq: return lhs.min <= c + kEqualityTolerance && lhs.max >= c - kEqualityTolerance;
    case Cmp::GreaterEq: return lhs.max >= c - kEqualityTolerance;
    case Cmp::Greater: return lhs.max > c;
  }
  return false;
}

namespace {

bool has(const std::vector<PropId>& v, PropId p) { return std::find(v.begin(), v.end(), p) != v.end(); }

std::vector<Bounds> apply_effects(const EffectSet& effects, const std::vector<Bounds>& box) {
  std::vector<Bounds> out = box;
  for (const auto& e : effects.numeric) {
    if (e.mode == EffectMode::Assign) out[e.target] = interval_of(e.expression, box);
  }
  for (const auto& e : effects.numeric) {
    if (e.mode == EffectMode::Assign) continue;
    Bounds d = interval_of(e.expression, box);
    if (e.mode == EffectMode::Increase) {
      out[e.target].min += d.min;
      out[e.target].max += d.max;
    } else {
      out[e.target].min -= d.max;
      out[e.target].max -= d.min;
    }
  }
  return out;
}

}  // namespace

std::vector<int> applicable_snaps(const Problem& problem, const SearchState& state) {
  std::vector<int> out;
  const auto& snaps = problem.snaps();
  for (int id = 0; id < static_cast<int>(snaps.size()); ++id) {
    const SnapAction& a = snaps[id];
    if (a.end == SnapKind::End ? state.open[a.action] < 0 : state.open[a.action] >= 0) continue;
    if (!std::all_of(a.preconditions.propositions.begin(), a.preconditions.propositions.end(),
                     [&](PropId p) { return state.props[p]; }))
      continue;
    if (!std::all_of(a.preconditions.numeric.begin(), a.preconditions.numeric.end(),
                     [&](const LinearCondition& c) { return satisfiable_in(c, state.bounds); }))
      continue;
    bool breaks_invariant = false;
    for (int b = 0; b < problem.num_actions() && !breaks_invariant; ++b) {
      if (state.open[b] < 0 || b == a.action) continue;
      for (PropId p : problem.actions()[b].invariants.propositions)
        if (has(a.effects.del, p) && !has(a.effects.add, p)) breaks_invariant = true;
    }
    if (breaks_invariant) continue;
    if (a.end == SnapKind::Start) {
      bool holds = std::all_of(a.invariants.propositions.begin(), a.invariants.propositions.end(), [&](PropId p) {
        return has(a.effects.add, p) || (state.props[p] && !has(a.effects.del, p));
      });
      if (!holds) continue;
      auto after = apply_effects(a.effects, state.bounds);
      if (!std::all_of(a.invariants.numeric.begin(), a.invariants.numeric.end(),
                       [&](const LinearCondition& c) { return satisfiable_in(c, after); }))
        continue;
    }
    out.push_back(id);
  }
  return out;
}

SearchState successor(const Problem& problem, const std::shared_ptr<const SearchState>& parent, int snap_id,
                      double epsilon) {
  SearchState s = *parent;
  s.parent = parent;
  const SnapAction& a = problem.snap(snap_id);
  const int k = static_cast<int>(s.steps.size());

  Step step;
  step.snap = snap_id;
  std::set<VarId> touched(a.touched.begin(), a.touched.end());
  for (bool changed = !touched.empty(); changed;) {
    changed = false;
    for (int b = 0; b < problem.num_actions(); ++b) {
      if (s.open[b] < 0) continue;
      for (const auto& c : problem.actions()[b].invariants.numeric) {
        bool shares = std::any_of(c.terms.begin(), c.terms.end(), [&](const Term& t) { return touched.count(t.var); });
        if (!shares) continue;
        for (const auto& t : c.terms) changed |= touched.insert(t.var).second;
      }
    }
  }
  step.touched.assign(touched.begin(), touched.end());

  std::vector<int> preds;
  auto after_adder = [&](PropId p) {
    if (s.last_adder[p] >= 0) preds.push_back(s.last_adder[p]);
  };
  for (PropId p : a.preconditions.propositions) after_adder(p);
  if (a.end == SnapKind::Start)
    for (PropId p : a.invariants.propositions) after_adder(p);
  for (PropId p : a.effects.del) {
    for (int r : s.readers[p]) preds.push_back(r);
    after_adder(p);
  }
  for (PropId p : a.effects.add)
    if (s.last_deleter[p] >= 0) preds.push_back(s.last_deleter[p]);
  for (VarId v : step.touched)
    if (s.last_toucher[v] >= 0) preds.push_back(s.last_toucher[v]);
  if (a.end == SnapKind::End) {
    step.start_step = s.open[a.action];
    step.window = problem.actions()[a.action].duration_window(kStrictMargin);
    preds.push_back(step.start_step);
  }
  std::sort(preds.begin(), preds.end());
  preds.erase(std::unique(preds.begin(), preds.end()), preds.end());

  boost::dynamic_bitset<> anc(k);
  for (int p : preds) {
    boost::dynamic_bitset<> pa = s.ancestors[p];
    pa.resize(k);
    anc |= pa;
    anc.set(p);
  }
  for (int p : preds) {
    bool implied = std::any_of(preds.begin(), preds.end(), [&](int q) { return q != p && s.ancestors[q].size() > static_cast<std::size_t>(p) && s.ancestors[q][p]; });
    if (!implied) step.after.push_back(p);
  }
  s.ancestors.push_back(std::move(anc));

  const int node = s.stn.add_node();
  for (int p : step.after) s.stn.add_constraint(SearchState::node_of(p), node, epsilon, kInf);
  if (step.start_step >= 0)
    s.stn.add_constraint(SearchState::node_of(step.start_step), node, step.window.min, step.window.max);

  for (PropId p : a.preconditions.propositions) s.readers[p].push_back(k);
  for (PropId p : a.invariants.propositions) s.readers[p].push_back(k);
  for (PropId p : a.effects.del) {
    s.props[p] = 0;
    s.last_deleter[p] = k;
    s.readers[p].clear();
  }
  for (PropId p : a.effects.add) {
    s.props[p] = 1;
    s.last_adder[p] = k;
  }
  for (VarId v : step.touched) s.last_toucher[v] = k;
  s.bounds = apply_effects(a.effects, s.bounds);
  for (VarId v : a.touched) s.rates[v] = rate_after(a, v, s.rates[v]);
  if (a.end == SnapKind::Start) s.open[a.action] = k;
  if (a.end == SnapKind::End) s.open[a.action] = -1;
  s.steps.push_back(std::move(step));
  s.g = k + 1;
  return s;
}

bool goal_candidate(const Problem& problem, const SearchState& state) {
  if (state.num_open() > 0) return false;
  const auto& goal = problem.goal().propositions;
  return std::all_of(goal.begin(), goal.end(), [&](PropId p) { return state.props[p]; });
}

Plan build_plan(const Problem& problem, const SearchState& state, const std::vector<double>& times) {
  Plan plan;
  auto clamp = [](double t) { return t < 0.0 ? 0.0 : t; };
  std::vector<int> end_of(state.steps.size(), -1);
  for (int k = 0; k < static_cast<int>(state.steps.size()); ++k)
    if (state.steps[k].start_step >= 0) end_of[state.steps[k].start_step] = k;
  for (int k = 0; k < static_cast<int>(state.steps.size()); ++k) {
    const SnapAction& a = problem.snap(state.steps[k].snap);
    const std::string& name = problem.actions()[a.action].name;
    if (a.end == SnapKind::Instantaneous) {
      plan.steps.push_back({name, clamp(times[k]), 0.0, true});
    } else if (a.end == SnapKind::Start) {
      if (end_of[k] < 0) throw std::logic_error("plan extracted with an open action");
      plan.steps.push_back({name, clamp(times[k]), times[end_of[k]] - times[k], false});
    }
  }
  std::stable_sort(plan.steps.begin(), plan.steps.end(),
                   [](const PlanStep& x, const PlanStep& y) { return x.time < y.time; });
  return plan;
}

namespace {

struct OpenEntry {
  double f;
  double h;
  int g;
  long seq;
  // Generated states wait as (parent, snap, bounds) and are rebuilt when popped,
  // which keeps the openlist small.
  std::shared_ptr<const SearchState> parent;
  int snap;
  std::vector<Bounds> bounds;
};

// Lower f first, then lower h, then deeper g, then insertion order.
struct WorseThan {
  bool operator()(const OpenEntry& a, const OpenEntry& b) const {
    if (a.f != b.f) return a.f > b.f;
    if (a.h != b.h) return a.h > b.h;
    if (a.g != b.g) return a.g < b.g;
    return a.seq > b.seq;
  }
};

}  // namespace

SearchResult wa_star(const Problem& problem, const StrategyConfig& config, const SearchHooks& hooks) {
  config.validate();
  const auto started = std::chrono::steady_clock::now();
  SearchStats stats;
  SearchResult result;
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count(); };
  auto finish = [&](SearchStatus status) {
    result.status = status;
    result.stats = stats.snapshot();
    result.wall_seconds = elapsed();
    return result;
  };
  auto try_goal = [&](const SearchState& s) -> bool {
    if (!goal_candidate(problem, s)) return false;
    auto times = schedule_goal_state(problem, s, config, stats);
    if (!times) return false;
    result.plan = build_plan(problem, s, *times);
    return true;
  };

  auto root = std::make_shared<SearchState>(initial_state(problem));
  root->h = evaluate_heuristic(problem, *root);
  if (try_goal(*root)) return finish(SearchStatus::PlanFound);
  if (!std::isfinite(root->h)) return finish(SearchStatus::NoPlan);

  std::priority_queue<OpenEntry, std::vector<OpenEntry>, WorseThan> open;
  long seq = 0;
  auto expand = [&](const std::shared_ptr<const SearchState>& parent) -> bool {
    ++stats.states_expanded;
    for (int snap : applicable_snaps(problem, *parent)) {
      auto child = std::make_shared<SearchState>(successor(problem, parent, snap, config.epsilon));
      ConsistencyResult check = check_state_consistency(problem, *child, config, stats);
      if (hooks.on_feasibility_lp && check.decided_by == Decider::Lp && check.compiled)
        hooks.on_feasibility_lp(check.compiled->lp);
      if (!check.consistent) continue;
      child->bounds = update_bounds(problem, *child, &parent->bounds, check, config, stats);
      child->h = evaluate_heuristic(problem, *child);
      if (!std::isfinite(child->h)) continue;
      if (try_goal(*child)) return true;
      open.push({child->g + config.weight * child->h, child->h, child->g, seq++, parent, snap, std::move(child->bounds)});
    }
    return false;
  };
  std::shared_ptr<const SearchState> next = root;
  while (next || !open.empty()) {
    if (config.max_seconds >= 0 && elapsed() > config.max_seconds) return finish(SearchStatus::ResourceLimit);
    if (config.max_states >= 0 && stats.states_expanded.load() >= config.max_states)
      return finish(SearchStatus::ResourceLimit);
    if (!next) {
      OpenEntry top = open.top();
      open.pop();
      auto state = std::make_shared<SearchState>(successor(problem, top.parent, top.snap, config.epsilon));
      state->bounds = std::move(top.bounds);
      state->h = top.h;
      next = std::move(state);
    }
    auto state = std::move(next);
    next = nullptr;
    if (expand(state)) return finish(SearchStatus::PlanFound);
  }
  return finish(SearchStatus::NoPlan);
}

}  // namespace tnplan
