#pragma once

// Which solver-selection optimizations a search run uses, and its budgets.

#include <stdexcept>
#include <string>
#include <vector>

namespace tnplan {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct StrategyConfig {
  bool latest_action = false;   // STN-only check when the latest snap is purely propositional
  bool reformulate = false;     // effect-anchored rows, numeric-to-temporal conversion, closed-form bounds
  bool bound_hints = false;     // parent bounds injected as LP hints when they can only contract
  double weight = 5.0;
  double epsilon = 0.001;
  long max_states = -1;         // expanded states; negative means unlimited
  double max_seconds = -1.0;    // negative means unlimited

  /// Throws ConfigError on an inconsistent combination.
  void validate() const;
  std::string label() const;

  static StrategyConfig preset(const std::string& name);
  static const std::vector<std::string>& preset_names();

  friend bool operator==(const StrategyConfig&, const StrategyConfig&) = default;
};

}  // namespace tnplan
