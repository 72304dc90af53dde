#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "fixtures/flying_observer.hpp"
#include "fixtures/random_states.hpp"
#include "tnplan/heuristic.hpp"
#include "tnplan/pddl.hpp"
#include "tnplan/search.hpp"

using namespace tnplan;

namespace {

std::string replaced(std::string text, const std::string& from, const std::string& to) {
  auto at = text.find(from);
  REQUIRE(at != std::string::npos);
  return text.replace(at, from.size(), to);
}

Problem parse(const std::string& problem) {
  auto parsed = parse_domain_and_problem(kObserverDomain, problem);
  REQUIRE(parsed.ok());
  return *parsed.problem;
}

// Small variants of the one-leg instance, each with at most six ground actions.
std::vector<Problem> small_instances() {
  std::vector<Problem> out;
  out.push_back(parse(kObserverProblem));
  out.push_back(parse(replaced(kObserverProblem, "(= (target-start o1) 10)", "(= (target-start o1) 31)")));
  out.push_back(parse(replaced(kObserverProblem, "(= (target-start o1) 10)", "(= (target-start o1) 29)")));
  out.push_back(parse(replaced(kObserverProblem, "(= (time-for o1) 2)", "(= (time-for o1) 40)")));
  out.push_back(parse(replaced(kObserverProblem, "(optionfor o1 e1)", "")));
  out.push_back(parse(replaced(kObserverProblem, "(available e1)", "")));
  out.push_back(parse(replaced(kObserverProblem, "(:goal (and (observed o1) (done l0)))", "(:goal (and (pending o1 e1)))")));
  out.push_back(parse(replaced(kObserverProblem, "(:goal (and (observed o1) (done l0)))", "(:goal (and (done l0)))")));
  return out;
}

// Depth-bounded exhaustive search from `s` for a schedulable goal state.
bool reaches_goal(const Problem& p, const std::shared_ptr<const SearchState>& s, int depth) {
  const auto config = StrategyConfig::preset("baseline");
  SearchStats stats;
  if (goal_candidate(p, *s) && schedule_goal_state(p, *s, config, stats)) return true;
  if (depth == 0) return false;
  for (int snap : applicable_snaps(p, *s)) {
    auto child = std::make_shared<SearchState>(successor(p, s, snap, config.epsilon));
    auto check = check_state_consistency(p, *child, config, stats);
    if (!check.consistent) continue;
    child->bounds = update_bounds(p, *child, &s->bounds, check, config, stats);
    if (reaches_goal(p, child, depth - 1)) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("a satisfied goal scores zero") {
  Problem p = parse(replaced(kObserverProblem, "(:goal (and (observed o1) (done l0)))", "(:goal (and))"));
  CHECK(evaluate_heuristic(p, initial_state(p)) == 0.0);
}

TEST_CASE("the goal of the one-leg instance is a finite distance away") {
  Problem p = parse(kObserverProblem);
  double h = evaluate_heuristic(p, initial_state(p));
  CHECK(std::isfinite(h));
  CHECK(h >= 4.0);
}

TEST_CASE("a goal no action adds scores infinity") {
  Problem p = parse(replaced(kObserverProblem, "(optionfor o1 e1)", ""));
  CHECK(evaluate_heuristic(p, initial_state(p)) == kInf);
}

TEST_CASE("a target past the leg scores infinity") {
  Problem p = parse(replaced(kObserverProblem, "(= (target-start o1) 10)", "(= (target-start o1) 31)"));
  CHECK(evaluate_heuristic(p, initial_state(p)) == kInf);
}

TEST_CASE("zero exactly on goal states and infinity only on dead ends") {
  std::mt19937 rng(17);
  int dead = 0, zero = 0;
  for (const Problem& p : small_instances()) {
    REQUIRE(p.num_actions() <= 6);
    for (int i = 0; i < 60; ++i) {
      auto sample = random_states::walk(p, rng, 10);
      SearchStats stats;
      auto check = check_state_consistency(p, *sample.state, StrategyConfig::preset("baseline"), stats);
      if (!check.consistent) continue;
      double h = evaluate_heuristic(p, *sample.state);
      const bool goal = goal_candidate(p, *sample.state) && p.goal().numeric_conditions.empty();
      CHECK((h == 0.0) == goal);
      zero += h == 0.0;
      if (h == kInf) {
        ++dead;
        CHECK_FALSE(reaches_goal(p, sample.state, 10));
      }
    }
  }
  CHECK(dead > 0);
  CHECK(zero > 0);
}
