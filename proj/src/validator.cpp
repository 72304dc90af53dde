#include "tnplan/validator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <set>

namespace tnplan {

const char* to_string(ValidationStatus s) {
  switch (s) {
    case ValidationStatus::Valid: return "valid";
    case ValidationStatus::Invalid: return "invalid";
    case ValidationStatus::Malformed: return "malformed";
  }
  return "?";
}

namespace {

struct Event {
  double time;
  int order;   // ends sort before starts at equal times
  int index;   // plan step
  int snap;
};

bool holds(const LinearCondition& c, const std::vector<double>& values, double tol) {
  double lhs = 0.0;
  for (const auto& t : c.terms) lhs += t.weight * values[t.var];
  const double slack = tol * (1.0 + std::abs(c.constant));
  switch (c.cmp) {
    case Cmp::Less:
    case Cmp::LessEq: return lhs <= c.constant + slack;
    case Cmp::Eq: return std::abs(lhs - c.constant) <= slack;
    case Cmp::GreaterEq:
    case Cmp::Greater: return lhs >= c.constant - slack;
  }
  return false;
}

std::string show(const Problem& p, const LinearCondition& c) {
  std::string s;
  for (const auto& t : c.terms) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s%g*", s.empty() ? "" : " + ", t.weight);
    s += buf + std::string("(") + p.variables()[t.var] + ")";
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, " %s %g", to_string(c.cmp), c.constant);
  return s + buf;
}

struct Footprint {
  std::set<PropId> reads, adds, dels;
  std::set<VarId> var_reads, var_writes;
};

Footprint footprint(const SnapAction& s) {
  Footprint f;
  f.reads.insert(s.preconditions.propositions.begin(), s.preconditions.propositions.end());
  f.adds.insert(s.effects.add.begin(), s.effects.add.end());
  f.dels.insert(s.effects.del.begin(), s.effects.del.end());
  for (const auto& c : s.preconditions.numeric)
    for (const auto& t : c.terms) f.var_reads.insert(t.var);
  for (const auto& e : s.effects.numeric) {
    f.var_writes.insert(e.target);
    for (const auto& t : e.expression.terms) f.var_reads.insert(t.var);
  }
  for (const auto& e : s.started_rates) f.var_writes.insert(e.target);
  for (const auto& e : s.ended_rates) f.var_writes.insert(e.target);
  return f;
}

template <class T>
bool meets(const std::set<T>& a, const std::set<T>& b) {
  return std::any_of(a.begin(), a.end(), [&](const T& x) { return b.count(x) > 0; });
}

bool interferes(const Footprint& a, const Footprint& b) {
  auto one_way = [](const Footprint& x, const Footprint& y) {
    return meets(x.adds, y.reads) || meets(x.dels, y.reads) || meets(x.adds, y.dels) ||
           meets(x.var_writes, y.var_reads) ||
           meets(x.var_writes, y.var_writes);
  };
  return one_way(a, b) || one_way(b, a);
}

}  // namespace

ValidationResult validate(const Problem& problem, const Plan& plan, const ValidatorOptions& opt) {
  auto fail = [](ValidationStatus st, std::string why, double t) { return ValidationResult{st, std::move(why), t}; };
  char buf[256];

  std::vector<Event> events;
  std::vector<int> action_of(plan.steps.size());
  for (int i = 0; i < static_cast<int>(plan.steps.size()); ++i) {
    const PlanStep& step = plan.steps[i];
    const int a = problem.find_action(step.action);
    if (a < 0) return fail(ValidationStatus::Malformed, "unknown action (" + step.action + ")", step.time);
    if (!std::isfinite(step.time) || step.time < 0)
      return fail(ValidationStatus::Malformed, "bad timestamp for (" + step.action + ")", step.time);
    const DurativeAction& action = problem.actions()[a];
    action_of[i] = a;
    if (action.instantaneous != step.instantaneous)
      return fail(ValidationStatus::Malformed,
                  "(" + step.action + ") " + (action.instantaneous ? "is instantaneous" : "needs a duration"), step.time);
    if (action.instantaneous) {
      events.push_back({step.time, 1, i, problem.start_snap(a)});
      continue;
    }
    if (!std::isfinite(step.duration) || step.duration < 0)
      return fail(ValidationStatus::Malformed, "bad duration for (" + step.action + ")", step.time);
    for (const auto& c : action.duration) {
      LinearCondition d{{{1.0, 0}}, c.cmp, c.value};
      std::vector<double> value{step.duration};
      if (!holds(d, value, opt.tolerance)) {
        std::snprintf(buf, sizeof buf, "duration %g of (%s) violates ?duration %s %g", step.duration,
                      step.action.c_str(), to_string(c.cmp), c.value);
        return fail(ValidationStatus::Invalid, buf, step.time);
      }
    }
    events.push_back({step.time, 1, i, problem.start_snap(a)});
    events.push_back({step.time + step.duration, 0, i, problem.end_snap(a)});
  }
  std::stable_sort(events.begin(), events.end(), [](const Event& x, const Event& y) {
    if (x.time != y.time) return x.time < y.time;
    return x.order < y.order;
  });

  // Interfering events must be separated by epsilon.
  std::vector<Footprint> prints;
  for (const auto& e : events) prints.push_back(footprint(problem.snap(e.snap)));
  const double gap = opt.epsilon - opt.tolerance * opt.epsilon;
  for (std::size_t i = 0; i < events.size(); ++i) {
    for (std::size_t j = i + 1; j < events.size() && events[j].time - events[i].time < gap; ++j) {
      if (events[i].index == events[j].index) continue;
      if (!interferes(prints[i], prints[j])) continue;
      std::snprintf(buf, sizeof buf, "interfering events of (%s) and (%s) closer than %g",
                    plan.steps[events[i].index].action.c_str(), plan.steps[events[j].index].action.c_str(),
                    opt.epsilon);
      return fail(ValidationStatus::Invalid, buf, events[j].time);
    }
  }

  std::vector<char> props(problem.num_propositions(), 0);
  for (PropId p : problem.initial().true_propositions) props[p] = 1;
  std::vector<double> values = problem.initial().assignments;
  std::vector<double> rates(values.size(), 0.0);
  std::multiset<int> open;  // actions currently executing
  double now = 0.0;

  // Linear trajectories and linear conditions: an over-all condition holds on
  // an interval between events iff it holds at both ends, so checking open
  // invariants just before and just after every event covers the whole plan.
  auto check_invariants = [&](double t, const char* when) -> std::optional<ValidationResult> {
    for (int a : open) {
      const DurativeAction& action = problem.actions()[a];
      for (PropId p : action.invariants.propositions)
        if (!props[p])
          return fail(ValidationStatus::Invalid,
                      "invariant (" + problem.propositions()[p] + ") of (" + action.name + ") violated " + when, t);
      for (const auto& c : action.invariants.numeric)
        if (!holds(c, values, opt.tolerance))
          return fail(ValidationStatus::Invalid,
                      "invariant " + show(problem, c) + " of (" + action.name + ") violated " + when, t);
    }
    return std::nullopt;
  };

  for (const auto& ev : events) {
    for (std::size_t v = 0; v < values.size(); ++v) values[v] += rates[v] * (ev.time - now);
    now = ev.time;
    if (auto r = check_invariants(now, "before an event")) return *r;

    const SnapAction& s = problem.snap(ev.snap);
    const std::string label = "(" + problem.actions()[s.action].name + ")" +
                              (s.end == SnapKind::Start ? " start" : s.end == SnapKind::End ? " end" : "");
    for (PropId p : s.preconditions.propositions)
      if (!props[p])
        return fail(ValidationStatus::Invalid, "precondition (" + problem.propositions()[p] + ") of " + label + " false",
                    now);
    for (const auto& c : s.preconditions.numeric)
      if (!holds(c, values, opt.tolerance))
        return fail(ValidationStatus::Invalid, "precondition " + show(problem, c) + " of " + label + " false", now);

    std::vector<double> next = values;
    for (const auto& e : s.effects.numeric)
      if (e.mode == EffectMode::Assign) next[e.target] = evaluate(e.expression, values);
    for (const auto& e : s.effects.numeric) {
      if (e.mode == EffectMode::Assign) continue;
      double d = evaluate(e.expression, values);
      next[e.target] += e.mode == EffectMode::Increase ? d : -d;
    }
    values = std::move(next);
    for (PropId p : s.effects.del) props[p] = 0;
    for (PropId p : s.effects.add) props[p] = 1;
    for (const auto& e : s.ended_rates) rates[e.target] = e.mode == RateMode::AssignRate ? 0.0 : rates[e.target] - e.signed_rate();
    for (const auto& e : s.started_rates) rates[e.target] = e.mode == RateMode::AssignRate ? e.rate : rates[e.target] + e.signed_rate();
    if (s.end == SnapKind::Start) open.insert(s.action);
    if (s.end == SnapKind::End) open.erase(open.find(s.action));
    if (auto r = check_invariants(now, "after an event")) return *r;
  }

  for (PropId p : problem.goal().propositions)
    if (!props[p]) return fail(ValidationStatus::Invalid, "goal (" + problem.propositions()[p] + ") not reached", now);
  for (const auto& c : problem.goal().numeric_conditions)
    if (!holds(c, values, opt.tolerance))
      return fail(ValidationStatus::Invalid, "goal " + show(problem, c) + " not reached", now);
  return {};
}

}  // namespace tnplan
