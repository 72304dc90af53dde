#pragma once

// The four-step partial plan take-off, fly l0 start, observe start, observe end
// on a one-leg instance where take-off is instantaneous and nothing needs
// configuring. Distance 30, speed 1, observation from `target_start` lasting 2.

#include <cstdio>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>

#include "tnplan/compile.hpp"
#include "tnplan/pddl.hpp"
#include "tnplan/search.hpp"

namespace table_plan {

inline constexpr const char* kDomain = R"(
(define (domain observer-table)
  (:requirements :durative-actions :fluents :continuous-effects)
  (:predicates (on-ground) (flying) (done) (awaiting) (observed))
  (:functions (flown-l0) (distance-l0) (target-start-o1) (time-for-o1))
  (:action take-off
    :precondition (on-ground)
    :effect (and (not (on-ground)) (flying)))
  (:durative-action fly-l0
    :duration (= ?duration (distance-l0))
    :condition (and (at start (flying)) (over all (<= (flown-l0) (distance-l0))))
    :effect (and (at end (done)) (at end (not (flying))) (increase (flown-l0) (* #t 1))))
  (:durative-action observe-o1
    :duration (= ?duration (time-for-o1))
    :condition (and (at start (awaiting)) (at start (>= (flown-l0) (target-start-o1))) (over all (flying)))
    :effect (and (at start (not (awaiting))) (at end (observed))))
)
)";

inline std::string problem_text(double target_start) {
  char buf[512];
  std::snprintf(buf, sizeof buf, R"(
(define (problem table)
  (:domain observer-table)
  (:init (on-ground) (awaiting) (= (flown-l0) 0) (= (distance-l0) 30) (= (target-start-o1) %.17g) (= (time-for-o1) 2))
  (:goal (and (observed) (done)))
)
)", target_start);
  return buf;
}

inline tnplan::Problem problem(double target_start) {
  auto parsed = tnplan::parse_domain_and_problem(kDomain, problem_text(target_start));
  if (!parsed.ok()) throw std::runtime_error("table fixture does not parse");
  return *parsed.problem;
}

inline std::shared_ptr<const tnplan::SearchState> state(const tnplan::Problem& p, double epsilon) {
  auto s = std::make_shared<const tnplan::SearchState>(tnplan::initial_state(p));
  auto apply = [&](int snap) {
    if (snap < 0) throw std::runtime_error("missing snap");
    s = std::make_shared<const tnplan::SearchState>(tnplan::successor(p, s, snap, epsilon));
  };
  apply(p.start_snap(p.find_action("take-off")));
  apply(p.start_snap(p.find_action("fly-l0")));
  apply(p.start_snap(p.find_action("observe-o1")));
  apply(p.end_snap(p.find_action("observe-o1")));
  return s;
}

inline std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

/// Rows as "coef*name ... cmp rhs" with terms sorted by name.
inline std::multiset<std::string> canonical_rows(const tnplan::LinearProgram& lp,
                                                 const std::map<std::string, std::string>& rename = {}) {
  std::multiset<std::string> out;
  for (const auto& row : lp.constraints()) {
    std::map<std::string, double> terms;
    for (const auto& t : row.terms) {
      std::string name = lp.variables()[t.var].name;
      if (auto it = rename.find(name); it != rename.end()) name = it->second;
      terms[name] += t.weight;
    }
    std::string s;
    for (const auto& [name, w] : terms) s += fmt(w) + "*" + name + " ";
    s += std::string(tnplan::to_string(row.cmp)) + " " + fmt(row.constant);
    out.insert(s);
  }
  return out;
}

inline std::string row(const std::map<std::string, double>& terms, const char* cmp, double rhs) {
  std::string s;
  for (const auto& [name, w] : terms) s += fmt(w) + "*" + name + " ";
  return s + cmp + " " + fmt(rhs);
}

/// The table's rows. `extras` adds the two rows this compiler emits beyond
/// the table: the lower duration bound and the window tying now to fly's end.
inline std::multiset<std::string> expected_rows(bool reformulated, double eps, bool extras) {
  std::multiset<std::string> r;
  const std::string f1 = "flown-l0_1'";
  r.insert(row({{"t0", 1}}, ">=", 0));
  // step 1
  r.insert(row({{"t1", 1}, {"t0", -1}}, ">=", eps));
  r.insert(row({{"flown-l0_1", 1}}, "=", 0));
  r.insert(row({{f1, 1}, {"flown-l0_1", -1}}, "=", 0));
  r.insert(row({{f1, 1}}, "<=", 30));
  // step 2
  r.insert(row({{"t2", 1}, {"t1", -1}}, ">=", eps));
  r.insert(row({{"flown-l0_2", 1}, {f1, -1}, {"t2", -1}, {"t1", 1}}, "=", 0));
  r.insert(row({{"flown-l0_2", 1}}, ">=", 10));
  r.insert(row({{"flown-l0_2", 1}}, "<=", 30));
  r.insert(row({{"flown-l0_2'", 1}, {"flown-l0_2", -1}}, "=", 0));
  r.insert(row({{"flown-l0_2'", 1}}, ">=", 10));
  r.insert(row({{"flown-l0_2'", 1}}, "<=", 30));
  // step 3
  r.insert(row({{"t3", 1}, {"t2", -1}}, ">=", eps));
  r.insert(row({{"t3", 1}, {"t2", -1}}, "<=", 2));
  if (reformulated) r.insert(row({{"flown-l0_3", 1}, {f1, -1}, {"t3", -1}, {"t1", 1}}, "=", 0));
  else r.insert(row({{"flown-l0_3", 1}, {"flown-l0_2'", -1}, {"t3", -1}, {"t2", 1}}, "=", 0));
  r.insert(row({{"flown-l0_3", 1}}, "<=", 30));
  r.insert(row({{"flown-l0_3'", 1}, {"flown-l0_3", -1}}, "=", 0));
  r.insert(row({{"flown-l0_3'", 1}}, "<=", 30));
  // now
  r.insert(row({{"t_now", 1}, {"t3", -1}}, ">=", eps));
  r.insert(row({{"t_now", 1}, {"t2", -1}}, ">=", eps));
  r.insert(row({{"t_now", 1}, {"t1", -1}}, ">=", eps));
  if (reformulated) r.insert(row({{"flown-l0_now", 1}, {f1, -1}, {"t_now", -1}, {"t1", 1}}, "=", 0));
  else r.insert(row({{"flown-l0_now", 1}, {"flown-l0_3'", -1}, {"t_now", -1}, {"t3", 1}}, "=", 0));
  if (extras) {
    r.insert(row({{"t3", 1}, {"t2", -1}}, ">=", 2));
    r.insert(row({{"t_now", 1}, {"t1", -1}}, "<=", 30));
  }
  return r;
}

inline const std::map<std::string, std::string>& now_rename() {
  static const std::map<std::string, std::string> m{{"t_now_flown-l0", "t_now"}};
  return m;
}

}  // namespace table_plan
