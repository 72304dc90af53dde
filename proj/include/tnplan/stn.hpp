#pragma once

// Simple Temporal Network over step timestamps.
//
// Node 0 is the zero reference. Every other node is implicitly constrained to
// be non-negative (t_i - t_0 >= 0). A constraint (i, j, lb, ub) means
// lb <= t_j - t_i <= ub and is stored as the two distance-graph edges
// i -> j (ub) and j -> i (-lb).

#include <stdexcept>
#include <vector>

#include "tnplan/model.hpp"

namespace tnplan {

class InconsistentConstraint : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct StnConstraint {
  int from = 0;
  int to = 0;
  double lb = -kInf;
  double ub = kInf;
};

struct StnEdge {
  int from = 0;
  int to = 0;
  double weight = 0.0;
};

struct StnVerdict {
  bool consistent = true;
  std::vector<double> schedule;     // earliest time per node, zero node included
  std::vector<int> negative_cycle;  // nodes of the cycle, in edge order
};

class Stn {
 public:
  static constexpr int kZero = 0;

  Stn();
  explicit Stn(int extra_nodes);

  int add_node();
  int num_nodes() const { return static_cast<int>(potential_.size()); }

  /// Records lb <= t_j - t_i <= ub and re-propagates incrementally.
  /// Throws InconsistentConstraint when lb > ub.
  void add_constraint(int i, int j, double lb, double ub);
  void add_constraint(const StnConstraint& c) { add_constraint(c.from, c.to, c.lb, c.ub); }

  bool consistent() const { return consistent_; }
  const std::vector<StnConstraint>& constraints() const { return constraints_; }
  /// Full distance graph, implicit non-negativity edges included.
  std::vector<StnEdge> edges() const;

  StnVerdict check_consistency() const;

  /// Supremum of t_j - t_i over all schedules (+inf when unbounded).
  double max_difference(int i, int j) const;
  /// Infimum of t_j - t_i over all schedules (-inf when unbounded).
  double min_difference(int i, int j) const;

 private:
  void add_edge(int u, int v, double w);
  std::vector<double> shortest_from(int source, bool reversed) const;

  struct Arc {
    int to;
    double weight;
  };
  std::vector<std::vector<Arc>> out_;
  std::vector<std::vector<Arc>> in_;
  std::vector<double> potential_;
  std::vector<StnConstraint> constraints_;
  bool consistent_ = true;
  std::vector<int> witness_;
};

}  // namespace tnplan
