#pragma once

// Plan validation by direct simulation of the timed events.

#include <string>

#include "tnplan/model.hpp"

namespace tnplan {

struct ValidatorOptions {
  double epsilon = kDefaultEpsilon;  // required gap between interfering events
  double tolerance = 1e-4;           // slack on numeric comparisons and durations
};

enum class ValidationStatus { Valid, Invalid, Malformed };

const char* to_string(ValidationStatus s);

struct ValidationResult {
  ValidationStatus status = ValidationStatus::Valid;
  std::string reason;  // first violation
  double time = 0.0;

  bool valid() const { return status == ValidationStatus::Valid; }
};

ValidationResult validate(const Problem& problem, const Plan& plan, const ValidatorOptions& options = {});

}  // namespace tnplan
