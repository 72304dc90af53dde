#include "tnplan/strategy.hpp"

#include <cmath>

namespace tnplan {

void StrategyConfig::validate() const {
  if (reformulate && !latest_action) throw ConfigError("reformulation requires latest-action inspection (--sec31)");
  if (!(weight > 0.0) || !std::isfinite(weight)) throw ConfigError("weight must be a positive number");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ConfigError("epsilon must be a positive number");
}

std::string StrategyConfig::label() const {
  for (const auto& name : preset_names()) {
    StrategyConfig p = preset(name);
    if (p.latest_action == latest_action && p.reformulate == reformulate && p.bound_hints == bound_hints) return name;
  }
  return "custom";
}

const std::vector<std::string>& StrategyConfig::preset_names() {
  static const std::vector<std::string> names = {"baseline", "sec31", "sec31-32", "sec33", "sec31-33", "optic-ii"};
  return names;
}

StrategyConfig StrategyConfig::preset(const std::string& name) {
  StrategyConfig c;
  if (name == "baseline") return c;
  if (name == "sec31") {
    c.latest_action = true;
  } else if (name == "sec31-32") {
    c.latest_action = c.reformulate = true;
  } else if (name == "sec33") {
    c.bound_hints = true;
  } else if (name == "sec31-33") {
    c.latest_action = c.bound_hints = true;
  } else if (name == "optic-ii") {
    c.latest_action = c.reformulate = c.bound_hints = true;
  } else {
    throw ConfigError("unknown preset: " + name);
  }
  return c;
}

}  // namespace tnplan
