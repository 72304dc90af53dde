#include "tnplan/heuristic.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "tnplan/search.hpp"

namespace tnplan {

namespace {

// Layers after which a still-moving envelope is widened to infinity.
constexpr int kWideningLayers = 8;

struct Graph {
  std::vector<int> prop_layer;     // -1: not reached
  std::vector<int> snap_layer;     // first layer the snap was applied, -1: never
  std::vector<int> achiever;       // per proposition: first snap adding it
  std::vector<Bounds> envelope;
  std::vector<int> numeric_layer;  // per goal numeric condition
};

void widen(Bounds& b, const Bounds& by) {
  b.min = std::min(b.min, by.min);
  b.max = std::max(b.max, by.max);
}

// Range of v allowed by the conditions, the other variables taking any
// value in the box.
Bounds allowed_range(const std::vector<LinearCondition>& conds, VarId v, const std::vector<Bounds>& box) {
  Bounds r{-kInf, kInf};
  for (const auto& c : conds) {
    double w = 0.0;
    double rest_min = 0.0, rest_max = 0.0;
    for (const auto& t : c.terms) {
      if (t.var == v) {
        w += t.weight;
        continue;
      }
      const Bounds& b = box[t.var];
      rest_min += t.weight >= 0 ? t.weight * b.min : t.weight * b.max;
      rest_max += t.weight >= 0 ? t.weight * b.max : t.weight * b.min;
    }
    if (w == 0.0) continue;
    // w*v + rest <cmp> constant
    const bool upper = c.cmp == Cmp::Less || c.cmp == Cmp::LessEq || c.cmp == Cmp::Eq;
    const bool lower = c.cmp == Cmp::Greater || c.cmp == Cmp::GreaterEq || c.cmp == Cmp::Eq;
    if (upper && std::isfinite(rest_min)) {
      double k = (c.constant - rest_min) / w;
      if (w > 0) r.max = std::min(r.max, k);
      else r.min = std::max(r.min, k);
    }
    if (lower && std::isfinite(rest_max)) {
      double k = (c.constant - rest_max) / w;
      if (w > 0) r.min = std::max(r.min, k);
      else r.max = std::min(r.max, k);
    }
  }
  return r;
}

}  // namespace

double evaluate_heuristic(const Problem& problem, const SearchState& state) {
  const auto& snaps = problem.snaps();
  const int ns = static_cast<int>(snaps.size());
  const int na = problem.num_actions();
  Graph g;
  g.prop_layer.assign(problem.num_propositions(), -1);
  g.achiever.assign(problem.num_propositions(), -1);
  g.snap_layer.assign(ns, -1);
  g.envelope = state.bounds;
  const auto& goal = problem.goal();
  g.numeric_layer.assign(goal.numeric_conditions.size(), -1);
  for (int p = 0; p < problem.num_propositions(); ++p)
    if (state.props[p]) g.prop_layer[p] = 0;

  std::vector<double> longest(na);
  std::vector<int> open_actions;
  for (int a = 0; a < na; ++a) {
    longest[a] = problem.actions()[a].duration_window(kStrictMargin).max;
    if (state.open[a] >= 0) open_actions.push_back(a);
  }

  // Rates of open actions need no widening: the state bounds are taken at
  // now, which may lie anywhere up to the end of every open action.

  // Each snap waits for its unreached propositions (a start also for the
  // propositions its action keeps over all) and an end for its start.
  std::vector<int> need(ns, 0);
  std::vector<std::vector<int>> watchers(problem.num_propositions());
  std::vector<int> waiting;
  for (int id = 0; id < ns; ++id) {
    const SnapAction& a = snaps[id];
    std::vector<PropId> req = a.preconditions.propositions;
    if (a.end == SnapKind::Start)
      req.insert(req.end(), a.invariants.propositions.begin(), a.invariants.propositions.end());
    std::sort(req.begin(), req.end());
    req.erase(std::unique(req.begin(), req.end()), req.end());
    for (PropId p : req) {
      if (g.prop_layer[p] >= 0) continue;
      ++need[id];
      watchers[p].push_back(id);
    }
    if (a.end == SnapKind::End && state.open[a.action] < 0) ++need[id];
    if (need[id] == 0) waiting.push_back(id);
  }

  auto goal_reached = [&](int layer) {
    bool all = true;
    for (PropId p : goal.propositions) all &= g.prop_layer[p] >= 0;
    for (std::size_t i = 0; i < goal.numeric_conditions.size(); ++i) {
      if (g.numeric_layer[i] < 0 && satisfiable_in(goal.numeric_conditions[i], g.envelope)) g.numeric_layer[i] = layer;
      all &= g.numeric_layer[i] >= 0;
    }
    for (int a : open_actions) all &= g.snap_layer[problem.end_snap(a)] >= 0;
    return all;
  };

  std::vector<int> numeric_applied;  // applied snaps with numeric effects or rates
  int layer = 0;
  int quiet = 0;
  while (!goal_reached(layer)) {
    ++layer;
    std::vector<Bounds> next = g.envelope;
    bool structural = false;
    std::vector<int> fresh, still_waiting;
    for (int id : waiting) {
      const SnapAction& a = snaps[id];
      if (std::all_of(a.preconditions.numeric.begin(), a.preconditions.numeric.end(),
                      [&](const LinearCondition& c) { return satisfiable_in(c, g.envelope); }))
        fresh.push_back(id);
      else
        still_waiting.push_back(id);
    }
    waiting = std::move(still_waiting);
    std::vector<PropId> new_props;
    for (int id : fresh) {
      const SnapAction& a = snaps[id];
      g.snap_layer[id] = layer;
      structural = true;
      for (PropId p : a.effects.add) {
        if (g.prop_layer[p] >= 0) continue;
        g.prop_layer[p] = layer;
        g.achiever[p] = id;
        new_props.push_back(p);
      }
      if (!a.effects.numeric.empty() || !a.started_rates.empty() || !a.ended_rates.empty())
        numeric_applied.push_back(id);
    }
    for (int id : numeric_applied) {
      const SnapAction& a = snaps[id];
      for (const auto& e : a.effects.numeric) {
        Bounds d = interval_of(e.expression, g.envelope);
        Bounds cur = g.envelope[e.target];
        if (e.mode == EffectMode::Assign) widen(next[e.target], d);
        else if (e.mode == EffectMode::Increase) widen(next[e.target], {cur.min + d.min, cur.max + d.max});
        else widen(next[e.target], {cur.min - d.max, cur.max - d.min});
      }
      if (a.end == SnapKind::Start) {
        for (const auto& c : a.started_rates) {
          double delta = c.signed_rate() * longest[a.action];
          Bounds cur = g.envelope[c.target];
          // The action's own invariants stop its change where they would break.
          Bounds cap = allowed_range(a.invariants.numeric, c.target, g.envelope);
          widen(next[c.target], {std::max(cur.min + std::min(0.0, delta), std::min(cur.min, cap.min)),
                                 std::min(cur.max + std::max(0.0, delta), std::max(cur.max, cap.max))});
        }
      }
    }
    for (PropId p : new_props)
      for (int id : watchers[p])
        if (--need[id] == 0) waiting.push_back(id);
    for (int id : fresh) {
      const SnapAction& a = snaps[id];
      if (a.end != SnapKind::Start || state.open[a.action] >= 0) continue;
      const int end = problem.end_snap(a.action);
      if (end != id && --need[end] == 0) waiting.push_back(end);
    }
    std::sort(waiting.begin(), waiting.end());

    bool moved = false;
    for (std::size_t v = 0; v < next.size(); ++v) {
      if (next[v].min < g.envelope[v].min) {
        moved = true;
        if (quiet >= kWideningLayers) next[v].min = -kInf;
      }
      if (next[v].max > g.envelope[v].max) {
        moved = true;
        if (quiet >= kWideningLayers) next[v].max = kInf;
      }
    }
    g.envelope = std::move(next);
    if (structural) quiet = 0;
    else if (moved) ++quiet;
    else return kInf;
  }

  // Relaxed plan extraction: achievers of goal propositions and of their
  // preconditions, starts of used end snaps, ends of open actions.
  std::set<int> chosen;
  std::vector<int> agenda;
  auto need_snap = [&](int id) {
    if (id >= 0 && chosen.insert(id).second) agenda.push_back(id);
  };
  auto need_prop = [&](PropId p) {
    if (g.prop_layer[p] > 0) need_snap(g.achiever[p]);
  };
  auto need_numeric = [&](const LinearCondition& c, int by_layer) {
    if (satisfiable_in(c, state.bounds)) return;
    // One earliest snap changing a variable of the condition.
    for (const auto& t : c.terms) {
      int best = -1;
      for (int id : numeric_applied) {
        const SnapAction& a = snaps[id];
        if (g.snap_layer[id] < 0 || (by_layer >= 0 && g.snap_layer[id] > by_layer)) continue;
        if (!a.instant_effect_on(t.var) && !a.changes_rate_of(t.var)) continue;
        if (best < 0 || g.snap_layer[id] < g.snap_layer[best]) best = id;
      }
      need_snap(best);
    }
  };
  for (PropId p : goal.propositions) need_prop(p);
  for (std::size_t i = 0; i < goal.numeric_conditions.size(); ++i)
    need_numeric(goal.numeric_conditions[i], g.numeric_layer[i]);
  for (int a = 0; a < problem.num_actions(); ++a)
    if (state.open[a] >= 0) need_snap(problem.end_snap(a));
  while (!agenda.empty()) {
    int id = agenda.back();
    agenda.pop_back();
    const SnapAction& a = snaps[id];
    for (PropId p : a.preconditions.propositions) need_prop(p);
    for (const auto& c : a.preconditions.numeric) need_numeric(c, g.snap_layer[id]);
    if (a.end == SnapKind::Start) {
      for (PropId p : a.invariants.propositions) need_prop(p);
      need_snap(problem.end_snap(a.action));
    }
    if (a.end == SnapKind::End && state.open[a.action] < 0) need_snap(problem.start_snap(a.action));
  }
  return static_cast<double>(chosen.size());
}

}  // namespace tnplan
