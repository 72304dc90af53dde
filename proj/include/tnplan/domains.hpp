#pragma once

// Instance generators for the evaluation domains.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tnplan {

class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Family {
  FlyingObserver,
  FlyingObserverConfigureInFlight,
  FactoryQa,
  FactoryQaCalibrateInFlight,
  LinearGenerator,
};

const char* to_string(Family f);
std::optional<Family> family_from_string(const std::string& name);
const std::vector<Family>& all_families();

struct InstanceSpec {
  Family family = Family::FlyingObserver;
  // Observer and factory families: observations (samples) and legs (batches).
  // The in-flight variants read `observations` as the count per leg.
  int observations = 0;
  int legs = 0;
  int required = 0;
  int tanks = 0;             // LinearGenerator
  bool storage_cap = true;   // factory families: the global produced-parts invariant
  bool inferred = false;     // table row interpolated rather than published

  /// Throws DomainError when the parameters cannot form an instance.
  void validate() const;
};

struct GeneratedInstance {
  std::string name;
  std::string domain;
  std::string problem;
};

/// Same spec and seed give byte-identical text.
GeneratedInstance generate(const InstanceSpec& spec, std::uint64_t seed);

/// Instance `row` of the published instance list for a family. Rows 9 to 16
/// of the single-observation list are interpolated (+2 required per row).
InstanceSpec table_instance(Family family, int row);
int table_rows(Family family);

}  // namespace tnplan
