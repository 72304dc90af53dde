#include <doctest.h>

#include <set>

#include "fixtures/flying_observer.hpp"
#include "tnplan/pddl.hpp"

using namespace tnplan;

namespace {

Problem parse_ok(const char* domain, const char* problem) {
  auto r = parse_domain_and_problem(domain, problem);
  for (const auto& d : r.diagnostics) INFO(format_diagnostic(d));
  REQUIRE(r.ok());
  return *r.problem;
}

ParseDiagnostic parse_error(const std::string& domain, const std::string& problem) {
  auto r = parse_domain_and_problem(domain, problem);
  REQUIRE_FALSE(r.ok());
  REQUIRE(r.diagnostics.size() == 1);
  return r.diagnostics[0];
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  auto pos = s.find(from);
  REQUIRE(pos != std::string::npos);
  return s.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("flying observer grounds all six schemas") {
  Problem p = parse_ok(kObserverDomain, kObserverProblem);
  std::set<std::string> schemas;
  for (const auto& a : p.actions()) schemas.insert(a.name.substr(0, a.name.find(' ')));
  // set-course needs a (next ...) fact, so a single leg prunes it.
  CHECK(schemas == std::set<std::string>{"take-off", "fly", "configure", "observe", "release"});
  CHECK(p.num_variables() == 1);
  CHECK(p.variables()[0] == "flown l0");

  int fly = p.find_action("fly l0");
  REQUIRE(fly >= 0);
  const auto& a = p.actions()[fly];
  REQUIRE(a.duration.size() == 1);
  CHECK(a.duration[0].value == 30.0);
  REQUIRE(a.continuous.size() == 1);
  CHECK(a.continuous[0].rate == 1.0);
  REQUIRE(a.invariants.numeric.size() == 1);
  CHECK(a.invariants.numeric[0].cmp == Cmp::LessEq);
  CHECK(a.invariants.numeric[0].constant == 30.0);

  const auto& obs = p.actions()[p.find_action("observe l0 o1")];
  REQUIRE(obs.pre_start.numeric.size() == 1);
  CHECK(obs.pre_start.numeric[0].cmp == Cmp::GreaterEq);
  CHECK(obs.pre_start.numeric[0].constant == 10.0);
  CHECK(obs.duration[0].value == 2.0);
  CHECK(obs.invariants.propositions == std::vector<PropId>{p.find_proposition("flying l0")});

  // Static facts vanish from the model.
  CHECK(p.find_proposition("first-leg l0") < 0);
  CHECK(p.find_proposition("contains l0 o1") < 0);
}

TEST_CASE("a second leg brings set-course in") {
  std::string prob = replace(kObserverProblem, "l0 - leg", "l0 l1 - leg");
  prob = replace(prob, "(first-leg l0)", "(first-leg l0) (next l0 l1) (= (distance l1) 20) (= (speed l1) 2) (= (flown l1) 0)");
  Problem p = parse_ok(kObserverDomain, prob.c_str());
  std::set<std::string> schemas;
  for (const auto& a : p.actions()) schemas.insert(a.name.substr(0, a.name.find(' ')));
  CHECK(schemas == std::set<std::string>{"take-off", "set-course", "fly", "configure", "observe", "release"});
  CHECK(p.find_action("set-course l0 l1") >= 0);
  CHECK(p.find_action("set-course l1 l0") < 0);
  CHECK(p.find_action("take-off l1") < 0);
  CHECK(p.actions()[p.find_action("fly l1")].duration[0].value == 10.0);
  CHECK(p.actions()[p.find_action("fly l1")].continuous[0].rate == 2.0);
}

TEST_CASE("empty goal parses to an empty goal") {
  std::string prob = replace(kObserverProblem, "(:goal (and (observed o1) (done l0)))", "(:goal (and))");
  Problem p = parse_ok(kObserverDomain, prob.c_str());
  CHECK(p.goal().empty());
}

TEST_CASE("non-linear continuous effects are rejected by name") {
  std::string dom = replace(kObserverDomain, "(* #t (speed ?l))", "(* #t (^ 2 #t))");
  auto d = parse_error(dom, kObserverProblem);
  CHECK(d.message.find("unsupported feature") != std::string::npos);
  CHECK(d.message.find("non-linear") != std::string::npos);
}

TEST_CASE("diagnostics carry locations") {
  auto d = parse_error(replace(kObserverDomain, "(at start (on-ground))", "(at start (on-ground-x))"), kObserverProblem);
  CHECK(d.message.find("undeclared predicate on-ground-x") != std::string::npos);
  CHECK(d.line == 14);  // the take-off :condition line

  d = parse_error(std::string(kObserverDomain) + ")", kObserverProblem);
  CHECK(d.message.find("unbalanced") != std::string::npos);

  d = parse_error(replace(kObserverDomain, ":typing", ":typing :negative-preconditions"), kObserverProblem);
  CHECK(d.message.find("requirement :negative-preconditions") != std::string::npos);

  d = parse_error(replace(kObserverDomain, "(at start (on-ground))", "(at start (not (on-ground)))"), kObserverProblem);
  CHECK(d.message.find("negative conditions") != std::string::npos);

  d = parse_error(kObserverDomain, replace(kObserverProblem, "(awaiting o1)", "(awaiting o9)"));
  CHECK(d.message.find("undeclared object o9") != std::string::npos);

  d = parse_error(kObserverDomain, replace(kObserverProblem, "(:goal", "(:metric minimize (total-time)) (:goal"));
  CHECK(d.message.find("metric") != std::string::npos);
}

TEST_CASE("plan text format") {
  Plan plan{{{"fly l0", 5.001, 20.0, false}, {"take-off l0", 0.0, 5.0, false}}};
  CHECK(write_plan(plan) == "0.000000: (take-off l0) [5.000000]\n5.001000: (fly l0) [20.000000]\n");
  CHECK(write_plan(Plan{}).empty());

  Plan inst{{{"a", 1.0, 0.0, true}, {"b", 1.001, 0.0, true}}};
  CHECK(write_plan(inst) == "1.000000: (a)\n1.001000: (b)\n");

  auto back = read_plan(write_plan(plan));
  REQUIRE(back.plan);
  REQUIRE(back.plan->steps.size() == 2);
  CHECK(back.plan->steps[0].action == "take-off l0");
  CHECK(back.plan->steps[1].time == doctest::Approx(5.001));
  CHECK_FALSE(back.plan->steps[1].instantaneous);
  CHECK(read_plan(write_plan(inst)).plan->steps[1].instantaneous);

  auto bad = read_plan("0.0: (a) [1]\nthis is not a step\n");
  CHECK_FALSE(bad.plan);
  CHECK(bad.diagnostics.at(0).line == 2);
}

TEST_CASE("ground writers round-trip the model") {
  std::string prob = replace(kObserverProblem, "l0 - leg", "l0 l1 - leg");
  prob = replace(prob, "(first-leg l0)", "(first-leg l0) (next l0 l1) (= (distance l1) 20) (= (speed l1) 2) (= (flown l1) 0)");
  prob = replace(prob, "(done l0)", "(done l1) (>= (flown l1) 0.1)");
  Problem p = parse_ok(kObserverDomain, prob.c_str());
  auto dom = write_ground_domain(p);
  auto pro = write_ground_problem(p);
  Problem q = parse_ok(dom.c_str(), pro.c_str());
  CHECK(q == p);
  CHECK(write_ground_domain(q) == dom);
}
