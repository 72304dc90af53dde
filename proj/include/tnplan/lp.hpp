#pragma once

// Continuous linear programs and a two-phase dense simplex solver.

#include <stdexcept>
#include <string>
#include <vector>

#include "tnplan/model.hpp"

namespace tnplan {

inline constexpr double kLpTolerance = 1e-7;
inline constexpr double kStrictMargin = 1e-6;
inline constexpr int kLpIterationCap = 50000;

class LpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LpVariable {
  std::string name;
  double lower = -kInf;  // bound hints, emitted as explicit rows
  double upper = kInf;
};

enum class ObjectiveSense { None, Minimize, Maximize };

class LinearProgram {
 public:
  int add_variable(std::string name, double lower = -kInf, double upper = kInf);
  /// Adds sum(weight * x_var) <cmp> rhs. Term variables index LP variables.
  void add_constraint(LinearCondition row, std::string label = {});
  void set_hint(int var, double lower, double upper);
  void set_objective(ObjectiveSense sense, int var);
  void clear_objective() { sense_ = ObjectiveSense::None; objective_ = -1; }

  int num_variables() const { return static_cast<int>(variables_.size()); }
  const std::vector<LpVariable>& variables() const { return variables_; }
  const std::vector<LinearCondition>& constraints() const { return rows_; }
  const std::vector<std::string>& labels() const { return labels_; }
  ObjectiveSense sense() const { return sense_; }
  int objective() const { return objective_; }
  int find_variable(const std::string& name) const;

  /// True when `point` satisfies every row and hint within `tol`
  /// (strict rows are checked with the strict margin applied).
  bool satisfied_by(const std::vector<double>& point, double tol = kLpTolerance) const;

 private:
  std::vector<LpVariable> variables_;
  std::vector<LinearCondition> rows_;
  std::vector<std::string> labels_;
  ObjectiveSense sense_ = ObjectiveSense::None;
  int objective_ = -1;
};

enum class LpStatus { Feasible, Infeasible, Optimal, Unbounded };

struct LpOutcome {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> point;
  double value = 0.0;
  int direction = 0;  // +1 / -1 for Unbounded
};

/// Feasibility check; the objective (if any) is ignored.
LpOutcome solve_feasibility(const LinearProgram& lp);
/// Requires a Minimize/Maximize objective.
LpOutcome optimize(const LinearProgram& lp);

/// CPLEX-style LP text, for debugging dumps.
std::string to_lp_format(const LinearProgram& lp);

}  // namespace tnplan
