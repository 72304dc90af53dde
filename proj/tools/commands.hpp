#pragma once

#include <string>

#include "tnplan/compile.hpp"
#include "tnplan/search.hpp"

namespace tnplan::cli {

enum ExitCode { kPlanFound = 0, kNoPlan = 1, kBudget = 2, kInputError = 3 };

int run(int argc, char** argv);

std::string stats_json(const StatsSnapshot& stats, double wall_seconds, SearchStatus status);

}  // namespace tnplan::cli
