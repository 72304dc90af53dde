#include "commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "tnplan/domains.hpp"
#include "tnplan/lp.hpp"
#include "tnplan/pddl.hpp"
#include "tnplan/validator.hpp"

namespace tnplan::cli {

namespace {

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spill(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw InputError("cannot write " + path);
}

Problem load(const std::string& domain_text, const std::string& problem_text, const std::string& domain_path,
             const std::string& problem_path) {
  auto parsed = parse_domain_and_problem(domain_text, problem_text);
  for (const auto& d : parsed.diagnostics) {
    const bool in_problem = d.message.rfind("problem", 0) == 0;
    std::cerr << format_diagnostic(d, in_problem ? problem_path : domain_path) << "\n";
  }
  if (!parsed.ok()) throw InputError("cannot build the planning problem");
  return std::move(*parsed.problem);
}

struct ConfigFlags {
  std::string preset = "baseline";
  bool sec31 = false, sec32 = false, sec33 = false;
  double weight = 5.0;
  double epsilon = kDefaultEpsilon;
  long max_states = -1;
  double timeout = -1.0;

  void attach(CLI::App* app, double default_timeout) {
    timeout = default_timeout;
    app->add_option("--preset", preset, "Starting configuration")
        ->check(CLI::IsMember(StrategyConfig::preset_names()));
    app->add_flag("--sec31", sec31, "STN-only check when the latest snap is purely propositional");
    app->add_flag("--sec32", sec32, "Effect-anchored rows, numeric-to-temporal conversion, closed-form bounds");
    app->add_flag("--sec33", sec33, "Parent bounds as LP hints");
    app->add_option("--weight", weight, "Heuristic weight W")->check(CLI::PositiveNumber);
    app->add_option("--epsilon", epsilon, "Separation between interfering snaps")->check(CLI::PositiveNumber);
    app->add_option("--max-states", max_states, "Expansion budget");
    app->add_option("--timeout", timeout, "Wall-clock budget in seconds");
  }

  StrategyConfig config() const {
    StrategyConfig c = StrategyConfig::preset(preset);
    c.latest_action |= sec31;
    c.reformulate |= sec32;
    c.bound_hints |= sec33;
    c.weight = weight;
    c.epsilon = epsilon;
    c.max_states = max_states;
    c.max_seconds = timeout;
    c.validate();
    return c;
  }
};

int exit_for(SearchStatus s) {
  switch (s) {
    case SearchStatus::PlanFound: return kPlanFound;
    case SearchStatus::NoPlan: return kNoPlan;
    case SearchStatus::ResourceLimit: return kBudget;
  }
  return kNoPlan;
}

struct PlanArgs {
  std::string domain, problem, out, stats, dump_lp;
  ConfigFlags flags;
};

int cmd_plan(const PlanArgs& a) {
  const StrategyConfig config = a.flags.config();
  const Problem problem = load(slurp(a.domain), slurp(a.problem), a.domain, a.problem);
  SearchHooks hooks;
  long dumped = 0;
  if (!a.dump_lp.empty()) {
    std::filesystem::create_directories(a.dump_lp);
    hooks.on_feasibility_lp = [&](const LinearProgram& lp) {
      char name[32];
      std::snprintf(name, sizeof name, "feasibility-%06ld.lp", dumped++);
      spill((std::filesystem::path(a.dump_lp) / name).string(), to_lp_format(lp));
    };
  }
  const SearchResult r = wa_star(problem, config, hooks);
  if (!a.stats.empty()) spill(a.stats, stats_json(r.stats, r.wall_seconds, r.status));
  if (r.status != SearchStatus::PlanFound) {
    std::cerr << to_string(r.status) << "\n";
    return exit_for(r.status);
  }
  ValidatorOptions vopt;
  vopt.epsilon = config.epsilon;
  const ValidationResult v = validate(problem, *r.plan, vopt);
  if (!v.valid()) {
    std::cerr << "emitted plan does not validate: " << v.reason << "\n";
    return kNoPlan;
  }
  spill(a.out, write_plan(*r.plan));
  return kPlanFound;
}

struct ValidateArgs {
  std::string domain, problem, plan;
  double epsilon = kDefaultEpsilon;
};

int cmd_validate(const ValidateArgs& a) {
  const Problem problem = load(slurp(a.domain), slurp(a.problem), a.domain, a.problem);
  auto read = read_plan(slurp(a.plan));
  for (const auto& d : read.diagnostics) std::cerr << format_diagnostic(d, a.plan) << "\n";
  if (!read.plan) return kInputError;
  ValidatorOptions opt;
  opt.epsilon = a.epsilon;
  const ValidationResult v = validate(problem, *read.plan, opt);
  if (v.status == ValidationStatus::Malformed) {
    std::cerr << "malformed plan: " << v.reason << "\n";
    return kInputError;
  }
  if (!v.valid()) {
    std::cout << "invalid at " << v.time << ": " << v.reason << "\n";
    return kNoPlan;
  }
  std::cout << "valid\n";
  return kPlanFound;
}

struct BenchArgs {
  std::string family = "flying-observer";
  std::string rows = "1";
  std::vector<std::string> presets{"baseline", "sec31", "sec31-32", "optic-ii"};
  std::uint64_t seed = 1;
  bool no_cap = false;
  double timeout = 60.0;
  long max_states = -1;
  double epsilon = kDefaultEpsilon;
  std::string out;
};

std::pair<int, int> row_range(const std::string& text, int last) {
  int lo = 0, hi = 0;
  char dash = 0;
  std::istringstream in(text);
  if (!(in >> lo)) throw InputError("bad row range " + text);
  hi = lo;
  if (in >> dash) {
    if (dash != '-' || !(in >> hi)) throw InputError("bad row range " + text);
  }
  if (lo < 1 || hi < lo || hi > last) throw InputError("row range " + text + " outside 1-" + std::to_string(last));
  return {lo, hi};
}

std::string csv_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  return buf;
}

int cmd_bench(const BenchArgs& a) {
  const auto family = family_from_string(a.family);
  if (!family) throw InputError("unknown family " + a.family);
  const auto [lo, hi] = row_range(a.rows, table_rows(*family));
  for (const auto& p : a.presets) StrategyConfig::preset(p);

  std::ostringstream csv;
  csv << "family,row,instance,config,result,states_expanded,stn_only_decisions,conversions,"
         "lp_feasibility_calls,lp_optimize_calls,wall_seconds,plan_valid\n";
  for (int row = lo; row <= hi; ++row) {
    InstanceSpec spec = table_instance(*family, row);
    spec.storage_cap = !a.no_cap;
    const GeneratedInstance inst = generate(spec, a.seed);
    const Problem problem = load(inst.domain, inst.problem, inst.name + ".domain", inst.name + ".problem");
    for (const auto& preset : a.presets) {
      StrategyConfig config = StrategyConfig::preset(preset);
      config.max_seconds = a.timeout;
      config.max_states = a.max_states;
      config.epsilon = a.epsilon;
      const SearchResult r = wa_star(problem, config);
      const bool over = r.status == SearchStatus::ResourceLimit;
      std::string valid = "";
      if (r.plan) {
        ValidatorOptions vopt;
        vopt.epsilon = a.epsilon;
        valid = validate(problem, *r.plan, vopt).valid() ? "yes" : "no";
      }
      csv << a.family << ',' << row << ',' << inst.name << ',' << preset << ',' << to_string(r.status) << ','
          << r.stats.states_expanded << ',' << r.stats.stn_only_decisions << ',' << r.stats.conversions << ','
          << r.stats.lp_feasibility_calls << ',' << r.stats.lp_optimize_calls << ','
          << (over ? std::string("X") : csv_number(r.wall_seconds)) << ',' << valid << '\n';
      std::cerr << inst.name << " " << preset << " " << to_string(r.status) << "\n";
    }
  }
  spill(a.out, csv.str());
  return 0;
}

struct GenerateArgs {
  std::string family = "flying-observer";
  int row = 1;
  std::uint64_t seed = 1;
  bool no_cap = false;
  std::string dir = ".";
};

int cmd_generate(const GenerateArgs& a) {
  const auto family = family_from_string(a.family);
  if (!family) throw InputError("unknown family " + a.family);
  InstanceSpec spec = table_instance(*family, a.row);
  spec.storage_cap = !a.no_cap;
  const GeneratedInstance inst = generate(spec, a.seed);
  std::filesystem::create_directories(a.dir);
  const auto base = std::filesystem::path(a.dir) / inst.name;
  spill(base.string() + "-domain.pddl", inst.domain);
  spill(base.string() + "-problem.pddl", inst.problem);
  std::cout << base.string() << "-domain.pddl\n" << base.string() << "-problem.pddl\n";
  return 0;
}

}  // namespace

std::string stats_json(const StatsSnapshot& stats, double wall_seconds, SearchStatus status) {
  nlohmann::ordered_json j;
  j["states_expanded"] = stats.states_expanded;
  j["stn_only_decisions"] = stats.stn_only_decisions;
  j["conversions"] = stats.conversions;
  j["lp_feasibility_calls"] = stats.lp_feasibility_calls;
  j["lp_optimize_calls"] = stats.lp_optimize_calls;
  j["wall_seconds"] = wall_seconds;
  j["result"] = to_string(status);
  return j.dump(2) + "\n";
}

int run(int argc, char** argv) {
  CLI::App app{"Temporal-numeric forward-search planner"};
  app.require_subcommand(1);

  PlanArgs plan;
  auto* p = app.add_subcommand("plan", "Search for a plan");
  p->add_option("domain", plan.domain, "Domain file")->required();
  p->add_option("problem", plan.problem, "Problem file")->required();
  p->add_option("--out", plan.out, "Plan output (default stdout)");
  p->add_option("--stats", plan.stats, "Stats JSON output");
  p->add_option("--dump-lp", plan.dump_lp, "Directory receiving every feasibility program");
  plan.flags.attach(p, -1.0);

  ValidateArgs val;
  auto* v = app.add_subcommand("validate", "Check a plan");
  v->add_option("domain", val.domain, "Domain file")->required();
  v->add_option("problem", val.problem, "Problem file")->required();
  v->add_option("plan", val.plan, "Plan file")->required();
  v->add_option("--epsilon", val.epsilon, "Required separation of interfering events")->check(CLI::PositiveNumber);

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Run generated instances under several configurations");
  std::vector<std::string> families;
  for (Family f : all_families()) families.push_back(to_string(f));
  b->add_option("--family", bench.family, "Instance family")->check(CLI::IsMember(families));
  b->add_option("--rows", bench.rows, "Instance rows, e.g. 1-5");
  b->add_option("--presets", bench.presets, "Configurations")->delimiter(',')
      ->check(CLI::IsMember(StrategyConfig::preset_names()));
  b->add_option("--seed", bench.seed, "Generator seed");
  b->add_flag("--no-cap", bench.no_cap, "Drop the factory storage cap");
  b->add_option("--timeout", bench.timeout, "Per-run budget in seconds");
  b->add_option("--max-states", bench.max_states, "Per-run expansion budget");
  b->add_option("--epsilon", bench.epsilon, "Separation between interfering snaps")->check(CLI::PositiveNumber);
  b->add_option("--out", bench.out, "CSV output (default stdout)");

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Write a generated instance");
  g->add_option("--family", gen.family, "Instance family")->check(CLI::IsMember(families));
  g->add_option("--row", gen.row, "Instance row");
  g->add_option("--seed", gen.seed, "Generator seed");
  g->add_flag("--no-cap", gen.no_cap, "Drop the factory storage cap");
  g->add_option("--dir", gen.dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }
  try {
    if (p->parsed()) return cmd_plan(plan);
    if (v->parsed()) return cmd_validate(val);
    if (b->parsed()) return cmd_bench(bench);
    if (g->parsed()) return cmd_generate(gen);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

}  // namespace tnplan::cli
