#pragma once

// Forward-search state: propositions, numeric bounds and the partial plan.

#include <boost/dynamic_bitset.hpp>
#include <memory>
#include <vector>

#include "tnplan/model.hpp"
#include "tnplan/stn.hpp"

namespace tnplan {

struct Bounds {
  double min = 0.0;
  double max = 0.0;
  friend bool operator==(const Bounds&, const Bounds&) = default;
};

/// One applied snap-action. Step k is STN node k + 1.
struct Step {
  int snap = -1;
  // Variables whose value the compilation tracks at this step.
  std::vector<VarId> touched;
  // Earlier steps this one is ordered at least epsilon after (transitively reduced).
  std::vector<int> after;
  int start_step = -1;  // End snaps: the matching start
  DurationWindow window;
};

struct SearchState {
  std::vector<char> props;
  std::vector<Bounds> bounds;
  std::vector<Step> steps;
  std::vector<double> rates;  // per variable: sum of active rates
  std::vector<int> open;      // per action: step of its unmatched start, or -1

  // Ordering bookkeeping.
  std::vector<int> last_adder;
  std::vector<int> last_deleter;
  std::vector<std::vector<int>> readers;
  std::vector<int> last_toucher;
  std::vector<boost::dynamic_bitset<>> ancestors;  // per step, over ordering edges

  Stn stn;  // steps and their temporal constraints only
  int g = 0;
  double h = 0.0;
  std::shared_ptr<const SearchState> parent;

  int latest_snap() const { return steps.empty() ? -1 : steps.back().snap; }
  int num_open() const;
  static int node_of(int step) { return step + 1; }
};

SearchState initial_state(const Problem& problem);

}  // namespace tnplan
