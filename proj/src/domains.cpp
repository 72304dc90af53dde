#include "tnplan/domains.hpp"

#include <algorithm>
#include <array>
#include <random>
#include <sstream>

namespace tnplan {

namespace {

constexpr int kLegLength = 30;
constexpr int kFirstLegShort = 20;  // in-flight variants: shorter first leg
constexpr int kSharedTarget = 25;

struct TableRow {
  int observations, legs, required;
};

// Rows 9 to 16 interpolated between 8 and 17.
constexpr std::array<TableRow, 17> kSingleObservationRows{{
    {10, 28, 4},  {15, 38, 6},  {20, 48, 8},  {25, 58, 10}, {30, 68, 12}, {40, 78, 14},
    {40, 88, 16}, {40, 88, 18}, {40, 88, 20}, {40, 88, 22}, {40, 88, 24}, {40, 88, 26},
    {40, 88, 28}, {40, 88, 30}, {40, 88, 32}, {40, 88, 34}, {40, 88, 36},
}};
constexpr int kInFlightRows = 10;
constexpr int kGeneratorRows = 10;
constexpr int kObservationsPerLeg = 6;

bool in_flight(Family f) {
  return f == Family::FlyingObserverConfigureInFlight || f == Family::FactoryQaCalibrateInFlight;
}
bool factory(Family f) { return f == Family::FactoryQa || f == Family::FactoryQaCalibrateInFlight; }

// rng() % n is portable where std::uniform_int_distribution is not.
int pick(std::mt19937_64& rng, int lo, int hi) { return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1)); }

template <class T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng() % i]);
}

struct Observation {
  std::vector<int> legs;
  int target = 0;
  int duration = 0;
  std::vector<int> options;  // equipment
};

struct Layout {
  std::vector<int> distance;  // per leg
  std::vector<Observation> obs;
  std::vector<int> goal;      // observation indices
};

// Every observation needs its own type of equipment.
Observation random_observation(std::mt19937_64& rng, int leg, int leg_length, int equipment) {
  Observation o;
  o.legs = {leg};
  o.duration = pick(rng, 1, 5);
  o.target = pick(rng, 1, leg_length - o.duration - 1);
  o.options = {equipment};
  return o;
}

Layout single_observation_layout(const InstanceSpec& spec, std::mt19937_64& rng) {
  Layout l;
  l.distance.assign(spec.legs, kLegLength);
  std::vector<int> legs(spec.legs);
  for (int i = 0; i < spec.legs; ++i) legs[i] = i;
  shuffle(legs, rng);
  legs.resize(spec.observations);
  std::sort(legs.begin(), legs.end());
  for (int leg : legs) l.obs.push_back(random_observation(rng, leg, kLegLength, static_cast<int>(l.obs.size())));
  std::vector<int> order(spec.observations);
  for (int i = 0; i < spec.observations; ++i) order[i] = i;
  shuffle(order, rng);
  l.goal.assign(order.begin(), order.begin() + spec.required);
  std::sort(l.goal.begin(), l.goal.end());
  return l;
}

// The shared observation is contained in the first and the last leg, but
// the first leg ends before its target start.
Layout in_flight_layout(const InstanceSpec& spec, std::mt19937_64& rng) {
  Layout l;
  l.distance.assign(spec.legs, kLegLength);
  l.distance[0] = kFirstLegShort;
  Observation shared;
  shared.legs = {0, spec.legs - 1};
  shared.target = kSharedTarget;
  shared.duration = pick(rng, 1, kLegLength - kSharedTarget - 1);
  shared.options = {0};
  l.obs.push_back(shared);
  for (int leg = 0; leg < spec.legs; ++leg) {
    const bool has_shared = leg == 0 || leg == spec.legs - 1;
    for (int k = has_shared ? 1 : 0; k < spec.observations; ++k)
      l.obs.push_back(random_observation(rng, leg, l.distance[leg], static_cast<int>(l.obs.size())));
  }
  std::vector<int> others;
  for (int i = 1; i < static_cast<int>(l.obs.size()); ++i) others.push_back(i);
  shuffle(others, rng);
  l.goal = {0};
  l.goal.insert(l.goal.end(), others.begin(), others.begin() + (spec.required - 1));
  std::sort(l.goal.begin(), l.goal.end());
  return l;
}

const char* kObserverDomain = R"(
(define (domain flying-observer%VARIANT%)
  (:requirements :typing :durative-actions :fluents :continuous-effects)
  (:types leg observation equipment)
  (:predicates (on-ground) (airborne) (first-leg ?l - leg) (flying ?l - leg) (done ?l - leg) (next ?a ?b - leg)
               (available ?e - equipment) (optionfor ?o - observation ?e - equipment)
               (configuredfor ?o - observation) (pending ?o - observation ?e - equipment)
               (contains ?l - leg ?o - observation) (awaiting ?o - observation) (observed ?o - observation))
  (:functions (flown ?l - leg) (distance ?l - leg) (speed ?l - leg)
              (target-start ?o - observation) (time-for ?o - observation) - number)
  (:durative-action take-off
    :parameters (?l - leg)
    :duration (= ?duration 5)
    :condition (and (at start (on-ground)) (at start (first-leg ?l)))
    :effect (and (at start (not (on-ground))) (at start (assign (flown ?l) 0)) (at end (flying ?l)) (at end (airborne))))
  (:durative-action set-course
    :parameters (?a ?b - leg)
    :duration (= ?duration 1)
    :condition (and (at start (done ?a)) (at start (next ?a ?b)))
    :effect (and (at start (not (done ?a))) (at end (flying ?b)) (at end (assign (flown ?b) 0))))
  (:durative-action fly
    :parameters (?l - leg)
    :duration (= ?duration (/ (distance ?l) (speed ?l)))
    :condition (and (at start (flying ?l)) (over all (<= (flown ?l) (distance ?l))))
    :effect (and (at end (done ?l)) (at end (not (flying ?l)))
                 (increase (flown ?l) (* #t (speed ?l)))))
  (:durative-action configure
    :parameters (?o - observation ?e - equipment)
    :duration (= ?duration 1)
    :condition (and %AIRBORNE%(at start (available ?e)) (at start (optionfor ?o ?e)))
    :effect (and (at start (not (available ?e))) (at end (configuredfor ?o)) (at end (pending ?o ?e))))
  (:durative-action observe
    :parameters (?l - leg ?o - observation)
    :duration (= ?duration (time-for ?o))
    :condition (and (at start (configuredfor ?o)) (at start (contains ?l ?o)) (at start (awaiting ?o))
                    (at start (>= (flown ?l) (target-start ?o))) (over all (flying ?l)))
    :effect (and (at start (not (awaiting ?o))) (at end (observed ?o))))
  (:durative-action release
    :parameters (?o - observation ?e - equipment)
    :duration (= ?duration 1)
    :condition (and %AIRBORNE%(at start (pending ?o ?e)))
    :effect (and (at start (not (configuredfor ?o))) (at start (not (pending ?o ?e))) (at end (available ?e))))
)
)";

const char* kFactoryDomain = R"(
(define (domain factory-qa%VARIANT%)
  (:requirements :typing :durative-actions :fluents :continuous-effects)
  (:types batch sample machine)
  (:predicates (idle) (running) (first-batch ?b - batch) (producing ?b - batch) (finished ?b - batch)
               (follows ?a ?b - batch) (free ?m - machine) (usable ?s - sample ?m - machine)
               (calibrated ?s - sample) (in-use ?s - sample ?m - machine)
               (from ?b - batch ?s - sample) (waiting ?s - sample) (sampled ?s - sample))
  (:functions (produced ?b - batch) (batch-size ?b - batch) (rate ?b - batch) (total-parts) (storage-cap)
              (sample-start ?s - sample) (time-for ?s - sample) - number)
  (:durative-action start-line
    :parameters (?b - batch)
    :duration (= ?duration 5)
    :condition (and (at start (idle)) (at start (first-batch ?b)))
    :effect (and (at start (not (idle))) (at start (assign (produced ?b) 0)) (at end (producing ?b)) (at end (running))))
  (:durative-action switch-batch
    :parameters (?a ?b - batch)
    :duration (= ?duration 1)
    :condition (and (at start (finished ?a)) (at start (follows ?a ?b)))
    :effect (and (at start (not (finished ?a))) (at end (producing ?b)) (at end (assign (produced ?b) 0))))
  (:durative-action produce
    :parameters (?b - batch)
    :duration (= ?duration (/ (batch-size ?b) (rate ?b)))
    :condition (and (at start (producing ?b)) (over all (<= (produced ?b) (batch-size ?b)))%CAP%)
    :effect (and (at end (finished ?b)) (at end (not (producing ?b)))
                 (increase (produced ?b) (* #t (rate ?b))) (increase (total-parts) (* #t (rate ?b)))))
  (:durative-action calibrate
    :parameters (?s - sample ?m - machine)
    :duration (= ?duration 1)
    :condition (and %RUNNING%(at start (free ?m)) (at start (usable ?s ?m)))
    :effect (and (at start (not (free ?m))) (at end (calibrated ?s)) (at end (in-use ?s ?m))))
  (:durative-action sample
    :parameters (?b - batch ?s - sample)
    :duration (= ?duration (time-for ?s))
    :condition (and (at start (calibrated ?s)) (at start (from ?b ?s)) (at start (waiting ?s))
                    (at start (>= (produced ?b) (sample-start ?s))) (over all (producing ?b)))
    :effect (and (at start (not (waiting ?s))) (at end (sampled ?s))))
  (:durative-action reset
    :parameters (?s - sample ?m - machine)
    :duration (= ?duration 1)
    :condition (and %RUNNING%(at start (in-use ?s ?m)))
    :effect (and (at start (not (calibrated ?s))) (at start (not (in-use ?s ?m))) (at end (free ?m))))
)
)";

const char* kGeneratorDomain = R"(
(define (domain linear-generator)
  (:requirements :typing :durative-actions :fluents :continuous-effects)
  (:types tank)
  (:predicates (ready) (generating) (generator-ran) (available ?t - tank))
  (:functions (fuel) (capacity) (demand) - number)
  (:durative-action generate
    :parameters ()
    :duration (= ?duration (demand))
    :condition (and (at start (ready)) (over all (>= (fuel) 0)))
    :effect (and (at start (not (ready))) (at start (generating))
                 (at end (not (generating))) (at end (generator-ran))
                 (decrease (fuel) (* #t 1))))
  (:durative-action refuel
    :parameters (?t - tank)
    :duration (= ?duration 10)
    :condition (and (at start (available ?t)) (over all (generating)) (over all (<= (fuel) (capacity))))
    :effect (and (at start (not (available ?t))) (increase (fuel) (* #t 2))))
)
)";

void replace_all(std::string& s, const std::string& from, const std::string& to) {
  for (std::size_t at = s.find(from); at != std::string::npos; at = s.find(from, at + to.size()))
    s.replace(at, from.size(), to);
}

std::string observer_domain(bool in_flight_variant) {
  std::string d = kObserverDomain;
  replace_all(d, "%VARIANT%", in_flight_variant ? "-in-flight" : "");
  replace_all(d, "%AIRBORNE%", in_flight_variant ? "(at start (airborne)) " : "");
  return d;
}

std::string factory_domain(bool in_flight_variant, bool cap) {
  std::string d = kFactoryDomain;
  replace_all(d, "%VARIANT%", in_flight_variant ? "-in-flight" : "");
  replace_all(d, "%RUNNING%", in_flight_variant ? "(at start (running)) " : "");
  replace_all(d, "%CAP%", cap ? " (over all (<= (total-parts) (storage-cap)))" : "");
  return d;
}

// Object names per family.
struct Vocabulary {
  const char *domain, *leg, *obs, *equip, *leg_type, *obs_type, *equip_type;
};

std::string layout_problem(const InstanceSpec& spec, const Layout& l, const std::string& name) {
  const bool fac = factory(spec.family);
  const Vocabulary v = fac ? Vocabulary{"factory-qa", "b", "s", "m", "batch", "sample", "machine"}
                           : Vocabulary{"flying-observer", "l", "o", "e", "leg", "observation", "equipment"};
  const std::string domain = std::string(v.domain) + (in_flight(spec.family) ? "-in-flight" : "");
  auto leg = [&](int i) { return v.leg + std::to_string(i); };
  auto obs = [&](int i) { return v.obs + std::to_string(i); };
  auto eq = [&](int i) { return v.equip + std::to_string(i); };

  std::ostringstream o;
  o << "(define (problem " << name << ")\n  (:domain " << domain << ")\n  (:objects";
  for (std::size_t i = 0; i < l.distance.size(); ++i) o << ' ' << leg(i);
  o << " - " << v.leg_type << "\n   ";
  for (std::size_t i = 0; i < l.obs.size(); ++i) o << ' ' << obs(i);
  o << " - " << v.obs_type << "\n   ";
  for (std::size_t i = 0; i < l.obs.size(); ++i) o << ' ' << eq(i);
  o << " - " << v.equip_type << ")\n  (:init\n";
  if (fac) {
    o << "    (idle) (first-batch b0) (= (total-parts) 0)";
    if (spec.storage_cap) {
      int cap = 0;
      for (int d : l.distance) cap += d;
      o << " (= (storage-cap) " << cap + 1 << ")";
    }
    o << "\n";
  } else {
    o << "    (on-ground) (first-leg l0)\n";
  }
  for (std::size_t i = 0; i < l.distance.size(); ++i) {
    const std::string b = leg(i);
    o << "    ";
    if (i + 1 < l.distance.size()) o << (fac ? "(follows " : "(next ") << b << ' ' << leg(i + 1) << ") ";
    if (fac)
      o << "(= (produced " << b << ") 0) (= (batch-size " << b << ") " << l.distance[i] << ") (= (rate " << b
        << ") 1)\n";
    else
      o << "(= (flown " << b << ") 0) (= (distance " << b << ") " << l.distance[i] << ") (= (speed " << b
        << ") 1)\n";
  }
  for (std::size_t i = 0; i < l.obs.size(); ++i) o << "    (" << (fac ? "free " : "available ") << eq(i) << ")\n";
  for (std::size_t i = 0; i < l.obs.size(); ++i) {
    const Observation& ob = l.obs[i];
    const std::string s = obs(i);
    o << "    (" << (fac ? "waiting " : "awaiting ") << s << ")";
    for (int lg : ob.legs) o << " (" << (fac ? "from " : "contains ") << leg(lg) << ' ' << s << ")";
    for (int e : ob.options) o << " (" << (fac ? "usable " : "optionfor ") << s << ' ' << eq(e) << ")";
    o << " (= (" << (fac ? "sample-start " : "target-start ") << s << ") " << ob.target << ")";
    o << " (= (time-for " << s << ") " << ob.duration << ")\n";
  }
  o << "  )\n  (:goal (and";
  for (int g : l.goal) o << " (" << (fac ? "sampled " : "observed ") << obs(g) << ")";
  o << "))\n)\n";
  return o.str();
}

std::string generator_problem(const InstanceSpec& spec, const std::string& name) {
  // A refuel delivers 20. The demand exceeds the initial fuel plus one
  // delivery, so two tanks are needed whatever their number.
  const int capacity = 60, initial = 40;
  const int refuels = std::min(2, spec.tanks);
  const int demand = initial + 20 * (refuels - 1) + 5 * (refuels > 1);
  std::ostringstream o;
  o << "(define (problem " << name << ")\n  (:domain linear-generator)\n  (:objects";
  for (int i = 0; i < spec.tanks; ++i) o << " t" << i;
  o << " - tank)\n  (:init (ready) (= (fuel) " << initial << ") (= (capacity) " << capacity << ") (= (demand) "
    << demand << ")\n   ";
  for (int i = 0; i < spec.tanks; ++i) o << " (available t" << i << ")";
  o << ")\n  (:goal (generator-ran))\n)\n";
  return o.str();
}

}  // namespace

const char* to_string(Family f) {
  switch (f) {
    case Family::FlyingObserver: return "flying-observer";
    case Family::FlyingObserverConfigureInFlight: return "flying-observer-in-flight";
    case Family::FactoryQa: return "factory-qa";
    case Family::FactoryQaCalibrateInFlight: return "factory-qa-in-flight";
    case Family::LinearGenerator: return "linear-generator";
  }
  return "?";
}

const std::vector<Family>& all_families() {
  static const std::vector<Family> all{Family::FlyingObserver, Family::FlyingObserverConfigureInFlight,
                                       Family::FactoryQa, Family::FactoryQaCalibrateInFlight,
                                       Family::LinearGenerator};
  return all;
}

std::optional<Family> family_from_string(const std::string& name) {
  for (Family f : all_families())
    if (name == to_string(f)) return f;
  return std::nullopt;
}

void InstanceSpec::validate() const {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw DomainError(what);
  };
  if (family == Family::LinearGenerator) {
    need(tanks >= 1, "a generator instance needs at least one tank");
    return;
  }
  need(legs >= 1, "at least one leg is needed");
  need(required >= 1, "at least one observation must be required");
  if (in_flight(family)) {
    need(legs >= 2, "the in-flight variant needs two legs");
    need(observations >= 1, "at least one observation per leg is needed");
    need(required <= observations * legs - 1, "more required observations than defined");
  } else {
    need(observations >= 1 && observations <= legs, "one observation per leg at most");
    need(required <= observations, "more required observations than defined");
  }
}

GeneratedInstance generate(const InstanceSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::mt19937_64 rng(seed);
  GeneratedInstance out;
  std::ostringstream name;
  name << to_string(spec.family) << '-';
  if (spec.family == Family::LinearGenerator) {
    name << spec.tanks;
  } else {
    name << spec.observations << '-' << spec.legs << '-' << spec.required;
    if (factory(spec.family) && !spec.storage_cap) name << "-nocap";
  }
  name << "-s" << seed;
  out.name = name.str();
  if (spec.family == Family::LinearGenerator) {
    out.domain = kGeneratorDomain;
    out.problem = generator_problem(spec, out.name);
    return out;
  }
  const Layout layout = in_flight(spec.family) ? in_flight_layout(spec, rng) : single_observation_layout(spec, rng);
  out.domain = factory(spec.family) ? factory_domain(in_flight(spec.family), spec.storage_cap)
                                    : observer_domain(in_flight(spec.family));
  out.problem = layout_problem(spec, layout, out.name);
  return out;
}

int table_rows(Family family) {
  if (family == Family::LinearGenerator) return kGeneratorRows;
  return in_flight(family) ? kInFlightRows : static_cast<int>(kSingleObservationRows.size());
}

InstanceSpec table_instance(Family family, int row) {
  if (row < 1 || row > table_rows(family)) throw DomainError("no such instance row");
  InstanceSpec s;
  s.family = family;
  if (family == Family::LinearGenerator) {
    s.tanks = 10 * row;
  } else if (in_flight(family)) {
    s.legs = row + 1;
    s.observations = kObservationsPerLeg;
    s.required = row + 1;
  } else {
    const TableRow& r = kSingleObservationRows[row - 1];
    s.observations = r.observations;
    s.legs = r.legs;
    s.required = r.required;
    s.inferred = row >= 9 && row <= 16;
  }
  return s;
}

}  // namespace tnplan
