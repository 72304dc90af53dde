#pragma once

// Reader and writers for the PDDL 2.1 temporal-numeric subset.
//
// Domains are grounded while parsing. Predicates and functions that no
// effect can change are folded into the ground actions, so the resulting
// Problem only contains propositions and variables the planner can alter
// (plus goal propositions that are statically false).

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tnplan/model.hpp"

namespace tnplan {

struct ParseDiagnostic {
  enum class Severity { Error, Warning };
  Severity severity = Severity::Error;
  int line = 0;
  int column = 0;
  std::string message;
};

std::string format_diagnostic(const ParseDiagnostic& d, std::string_view file = {});

struct ParseResult {
  std::optional<Problem> problem;
  std::string domain_name;
  std::string problem_name;
  std::vector<ParseDiagnostic> diagnostics;

  bool ok() const { return problem.has_value(); }
};

ParseResult parse_domain_and_problem(std::string_view domain_text, std::string_view problem_text);

/// "<start>: (<name>) [<duration>]" per step, sorted by start time.
std::string write_plan(const Plan& plan);

struct PlanReadResult {
  std::optional<Plan> plan;
  std::vector<ParseDiagnostic> diagnostics;
};

PlanReadResult read_plan(std::string_view text);

/// A parameterless domain/problem pair that parses back to `problem`.
std::string write_ground_domain(const Problem& problem, std::string_view name = "ground");
std::string write_ground_problem(const Problem& problem, std::string_view name = "ground-problem",
                                 std::string_view domain = "ground");

}  // namespace tnplan
