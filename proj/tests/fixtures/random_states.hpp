#pragma once

// Reachable search states drawn by random walks. Every state on the walk but
// the last was judged consistent under the baseline configuration, so the
// last one may be either consistent or not.

#include <memory>
#include <random>
#include <vector>

#include "tnplan/compile.hpp"
#include "tnplan/search.hpp"

namespace random_states {

struct Sample {
  std::shared_ptr<const tnplan::SearchState> state;
  std::vector<tnplan::Bounds> parent_bounds;
};

inline Sample walk(const tnplan::Problem& p, std::mt19937& rng, int max_steps, double epsilon = 0.001) {
  const auto baseline = tnplan::StrategyConfig::preset("baseline");
  auto s = std::make_shared<const tnplan::SearchState>(tnplan::initial_state(p));
  std::vector<tnplan::Bounds> parent_bounds = s->bounds;
  int length = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_steps));
  for (int i = 0; i < length; ++i) {
    auto app = tnplan::applicable_snaps(p, *s);
    if (app.empty()) break;
    auto child = std::make_shared<tnplan::SearchState>(tnplan::successor(p, s, app[rng() % app.size()], epsilon));
    tnplan::SearchStats stats;
    auto check = tnplan::check_state_consistency(p, *child, baseline, stats);
    parent_bounds = s->bounds;
    if (!check.consistent) return {child, parent_bounds};
    child->bounds = tnplan::update_bounds(p, *child, &s->bounds, check, baseline, stats);
    s = child;
  }
  return {s, parent_bounds};
}

}  // namespace random_states
