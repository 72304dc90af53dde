#include <doctest.h>

#include <set>

#include "tnplan/domains.hpp"
#include "tnplan/pddl.hpp"

using namespace tnplan;

namespace {

Problem parse(const GeneratedInstance& g) {
  auto parsed = parse_domain_and_problem(g.domain, g.problem);
  for (const auto& d : parsed.diagnostics) INFO(format_diagnostic(d));
  REQUIRE(parsed.ok());
  return *parsed.problem;
}

InstanceSpec small(Family f) {
  switch (f) {
    case Family::FlyingObserver: return {f, 4, 6, 2};
    case Family::FlyingObserverConfigureInFlight: return {f, 3, 2, 2};
    case Family::FactoryQa: return {f, 3, 4, 2};
    case Family::FactoryQaCalibrateInFlight: return {f, 3, 2, 2};
    case Family::LinearGenerator: return {f, 0, 0, 0, 3};
  }
  return {};
}

}  // namespace

TEST_CASE("family names round-trip") {
  for (Family f : all_families()) {
    auto back = family_from_string(to_string(f));
    REQUIRE(back);
    CHECK(*back == f);
  }
  CHECK_FALSE(family_from_string("no-such-family"));
}

TEST_CASE("every family generates text that parses") {
  for (Family f : all_families()) {
    INFO(to_string(f));
    auto g = generate(small(f), 7);
    Problem p = parse(g);
    CHECK(p.num_actions() > 0);
    CHECK_FALSE(p.goal().empty());
  }
}

TEST_CASE("generation is deterministic in the seed") {
  for (Family f : all_families()) {
    auto a = generate(small(f), 11);
    auto b = generate(small(f), 11);
    CHECK(a.name == b.name);
    CHECK(a.domain == b.domain);
    CHECK(a.problem == b.problem);
  }
  auto a = generate(small(Family::FlyingObserver), 1);
  auto b = generate(small(Family::FlyingObserver), 2);
  CHECK(a.problem != b.problem);
}

TEST_CASE("the instance list has the published first and last rows") {
  CHECK(table_rows(Family::FlyingObserver) == 17);
  auto first = table_instance(Family::FlyingObserver, 1);
  CHECK(first.observations == 10);
  CHECK(first.legs == 28);
  CHECK(first.required == 4);
  CHECK_FALSE(first.inferred);
  auto last = table_instance(Family::FlyingObserver, 17);
  CHECK_FALSE(last.inferred);
  CHECK(table_instance(Family::FlyingObserver, 9).inferred);
  CHECK(table_instance(Family::FlyingObserver, 16).inferred);
  CHECK_THROWS_AS(table_instance(Family::FlyingObserver, 0), DomainError);
  CHECK_THROWS_AS(table_instance(Family::FlyingObserver, 18), DomainError);
  for (Family f : all_families())
    for (int row = 1; row <= table_rows(f); ++row) CHECK_NOTHROW(table_instance(f, row).validate());
}

TEST_CASE("impossible specs are rejected") {
  CHECK_THROWS_AS((InstanceSpec{Family::FlyingObserver, 3, 5, 4}.validate()), DomainError);
  CHECK_THROWS_AS((InstanceSpec{Family::FlyingObserver, 0, 5, 0}.validate()), DomainError);
  CHECK_THROWS_AS((InstanceSpec{Family::LinearGenerator, 0, 0, 0, 0}.validate()), DomainError);
  CHECK_THROWS_AS(generate({Family::FactoryQa, 2, 1, 3}, 1), DomainError);
}

TEST_CASE("observer conditions mention one variable each") {
  Problem p = parse(generate(small(Family::FlyingObserver), 3));
  for (const auto& a : p.actions()) {
    for (const auto& c : a.pre_start.numeric) CHECK(c.single_variable());
    for (const auto& c : a.invariants.numeric) CHECK(c.single_variable());
  }
}

TEST_CASE("the generator domain has two rates on the fuel level") {
  Problem p = parse(generate(small(Family::LinearGenerator), 3));
  const VarId fuel = p.find_variable("fuel");
  REQUIRE(fuel >= 0);
  std::set<bool> signs;
  for (const auto& a : p.actions())
    for (const auto& e : a.continuous)
      if (e.target == fuel) signs.insert(e.signed_rate() > 0);
  CHECK(signs == std::set<bool>{false, true});
}

TEST_CASE("the storage cap toggles the global invariant") {
  auto count_multi = [](const Problem& p) {
    int n = 0;
    for (const auto& a : p.actions())
      for (const auto& c : a.invariants.numeric) n += !c.single_variable();
    return n;
  };
  InstanceSpec with = small(Family::FactoryQa);
  InstanceSpec without = with;
  without.storage_cap = false;
  Problem capped = parse(generate(with, 5));
  Problem free = parse(generate(without, 5));
  int capped_invariants = 0, free_invariants = 0;
  for (const auto& a : capped.actions()) capped_invariants += static_cast<int>(a.invariants.numeric.size());
  for (const auto& a : free.actions()) free_invariants += static_cast<int>(a.invariants.numeric.size());
  CHECK(capped_invariants > free_invariants);
  CHECK(count_multi(free) == 0);
  CHECK(generate(with, 5).name != generate(without, 5).name);
}
