#include "ehsched/cli.hpp"

#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "ehsched/experiments.hpp"
#include "ehsched/model_io.hpp"
#include "ehsched/monotone_search.hpp"
#include "ehsched/report.hpp"
#include "ehsched/solver.hpp"
#include "ehsched/structure.hpp"

namespace ehsched {

namespace {

namespace fs = std::filesystem;

constexpr double kViTolerance = 1e-8;
constexpr int kViMaxIterations = 1'000'000;

class Artifacts {
 public:
  explicit Artifacts(fs::path dir) : dir_(std::move(dir)) {}

  std::ofstream open(const fs::path& name) const {
    const fs::path path = dir_ / name;
    fs::create_directories(path.parent_path());
    std::ofstream os(path);
    if (!os) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
    return os;
  }

 private:
  fs::path dir_;
};

SolveResult solve(const Mdp& mdp, const RunConfig& cfg) {
  if (cfg.method == "vi") return value_iteration(mdp, ValueFunction(mdp.model()), kViTolerance, kViMaxIterations);
  return policy_iteration(mdp);
}

void require_model(const RunConfig& cfg) {
  if (!cfg.model_path) throw ValidationError("--model is required for this command");
}

void require_family(const RunConfig& cfg) {
  if (!cfg.family) throw ValidationError("--family is required for this command");
}

SearchOptions search_options(const RunConfig& cfg) { return {cfg.budget, cfg.threads}; }

void monte_carlo(std::ostream& out, const Mdp& mdp, const GapReport& gap, const RunConfig& cfg) {
  if (cfg.mc_trajectories == 0) return;
  const int horizon = discounted_horizon(mdp.model(), 1e-3);
  const auto est = simulate_policy(mdp, gap.best_policy, State{}, cfg.mc_trajectories, horizon, cfg.seed);
  const double exact = gap.best_value.at(mdp.model(), State{});
  fmt::print(out, "monte-carlo V(0,0): {:.6f} +- {:.6f} (exact {:.6f}, {} trajectories, horizon {}, seed {})\n",
             est.mean, est.std_error, exact, est.trajectories, est.horizon, cfg.seed);
}

int cmd_solve(const RunConfig& cfg, std::ostream& out, bool with_checks) {
  require_model(cfg);
  const ModelSpec m = load_model(*cfg.model_path);
  const Artifacts files(cfg.output_dir);
  if (cfg.dump_model) {
    std::ofstream os(*cfg.dump_model);
    if (!os) throw std::runtime_error(fmt::format("cannot write {}", cfg.dump_model->string()));
    os << dump_model(m);
  }
  const Mdp mdp(m);
  const auto result = solve(mdp, cfg);

  {
    auto os = files.open("value.csv");
    write_value_csv(os, m, result.value);
  }
  {
    auto os = files.open("policy.csv");
    write_policy_csv(os, m, result.policy);
  }

  std::vector<ViolationReport> reports;
  if (with_checks) {
    for (auto&& group : {check_value_monotone(m, result.value), check_h_properties(mdp, result.value),
                         check_submodularity(mdp, result.value), check_policy_monotone(m, result.policy)})
      reports.insert(reports.end(), group.begin(), group.end());
    auto os = files.open("violations.csv");
    write_violations_csv(os, reports);
  }

  std::ostringstream summary;
  fmt::print(summary, "method: {}  iterations: {}  residual: {:.3e}\n", cfg.method, result.iterations,
             result.residual);
  fmt::print(summary, "V*(0,0) = {:.6f}\n", result.value.at(m, State{}));
  if (with_checks) print_violations(summary, reports);
  {
    auto os = files.open("summary.txt");
    os << summary.str();
  }

  if (cfg.format == OutputFormat::kCsv) {
    write_policy_csv(out, m, result.policy);
    if (with_checks) write_violations_csv(out, reports);
    else write_value_csv(out, m, result.value);
    return exit_code::kOk;
  }
  out << summary.str() << "optimal policy:\n";
  print_policy_grid(out, m, result.policy);
  out << "optimal value:\n";
  print_value_grid(out, m, result.value);
  return exit_code::kOk;
}

int cmd_enumerate(const RunConfig& cfg, std::ostream& out) {
  require_model(cfg);
  require_family(cfg);
  const ModelSpec m = load_model(*cfg.model_path);
  const BigCount counted = count_monotone(m, *cfg.family);
  if (cfg.count_only) {
    out << counted.str() << '\n';
    return exit_code::kOk;
  }
  const MonotonePolicySpace space(m, *cfg.family, cfg.budget);
  std::uint64_t enumerated = 0;
  if (cfg.list) {
    auto os = Artifacts(cfg.output_dir).open("policies.csv");
    os << "index";
    for (const auto& st : m.states()) fmt::print(os, ",f({};{};{})", st.n, st.s, st.h + 1);
    os << '\n';
    space.for_range(0, space.size(), [&](std::uint64_t index, const Policy& f) {
      os << index;
      for (int u : f.actions()) os << ',' << u;
      os << '\n';
      ++enumerated;
    });
  } else {
    space.for_range(0, space.size(), [&](std::uint64_t, const Policy&) { ++enumerated; });
  }
  fmt::print(out, "family: {}\nenumerated: {}\ncounted: {}\n", to_string(*cfg.family), enumerated, counted.str());
  return BigCount(enumerated) == counted ? exit_code::kOk : exit_code::kReproduction;
}

int cmd_gap(const RunConfig& cfg, std::ostream& out, bool best) {
  require_model(cfg);
  if (best) require_family(cfg);
  const ModelSpec m = load_model(*cfg.model_path);
  const Mdp mdp(m);
  const auto optimal = solve(mdp, cfg);
  const GapReport gap = best ? best_monotone(mdp, *cfg.family, optimal.value, search_options(cfg))
                             : greedy_gap(mdp, optimal.value);
  const Artifacts files(cfg.output_dir);
  {
    auto os = files.open("gap_report.csv");
    write_gap_csv(os, m, optimal.value, gap);
  }
  {
    auto os = files.open("policy.csv");
    write_policy_csv(os, m, gap.best_policy);
  }
  {
    auto os = files.open("value.csv");
    write_value_csv(os, m, gap.best_value);
  }
  const std::string label = best ? fmt::format("best {}-monotone", to_string(*cfg.family)) : "greedy";
  std::ostringstream summary;
  print_gap(summary, label, gap);
  monte_carlo(summary, mdp, gap, cfg);
  {
    auto os = files.open("summary.txt");
    os << summary.str();
  }
  if (cfg.format == OutputFormat::kCsv) {
    write_gap_csv(out, m, optimal.value, gap);
    return exit_code::kOk;
  }
  out << summary.str() << label << " policy:\n";
  print_policy_grid(out, m, gap.best_policy);
  return exit_code::kOk;
}

int cmd_reproduce(const RunConfig& cfg, std::ostream& out) {
  std::vector<PresetName> names;
  for (const auto& p : cfg.presets) names.push_back(parse_preset(p));
  if (names.empty()) names = all_presets();

  const Artifacts files(cfg.output_dir);
  RunOptions options;
  options.search = search_options(cfg);
  std::ostringstream summary;
  bool ok = true;
  for (auto name : names) {
    const PresetRun run = run_preset(name, options);
    const auto dir = fs::path(to_string(name));
    const auto& m = run.preset.model;
    {
      auto os = files.open(dir / "policy.csv");
      write_policy_csv(os, m, run.optimal.policy);
    }
    {
      auto os = files.open(dir / "value.csv");
      write_value_csv(os, m, run.optimal.value);
    }
    {
      auto os = files.open(dir / "monotone_policy.csv");
      write_policy_csv(os, m, run.monotone.best_policy);
    }
    {
      auto os = files.open(dir / "gap_report.csv");
      write_gap_csv(os, m, run.optimal.value, run.monotone);
    }
    {
      auto os = files.open(dir / "violations.csv");
      std::vector<ViolationReport> all;
      for (const auto* group : {&run.value_checks, &run.h_checks, &run.submodularity, &run.policy_checks})
        all.insert(all.end(), group->begin(), group->end());
      write_violations_csv(os, all);
    }
    {
      auto os = files.open(dir / "checks.csv");
      write_checks_csv(os, run);
    }
    if (cfg.format == OutputFormat::kCsv) write_checks_csv(out, run);
    else print_preset_summary(out, run);
    print_preset_summary(summary, run);
    ok = ok && run.passed();
  }
  fmt::print(summary, "overall: {}\n", ok ? "pass" : "FAIL");
  {
    auto os = files.open("summary.txt");
    os << summary.str();
  }
  fmt::print(out, "overall: {}\n", ok ? "pass" : "FAIL");
  return ok ? exit_code::kOk : exit_code::kReproduction;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Delay-optimal scheduling for energy-harvesting transmitters", "ehsched"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string family;
  std::string format = "text";

  auto common = [&](CLI::App* sub, bool needs_model) {
    auto* model = sub->add_option("--model", cfg.model_path, "model file (JSON)");
    if (needs_model) model->required();
    sub->add_option("--output-dir", cfg.output_dir, "directory for CSV and summary artifacts");
    sub->add_option("--format", format, "stdout format")->check(CLI::IsMember({"text", "csv"}));
    sub->add_option("--threads", cfg.threads, "worker threads for policy sweeps (0 = all cores)");
  };

  auto* solve = app.add_subcommand("solve", "solve for V* and f*");
  common(solve, true);
  solve->add_option("--method", cfg.method, "pi or vi")->check(CLI::IsMember({"pi", "vi"}));
  solve->add_option("--dump-model", cfg.dump_model, "write the normalized model file here");

  auto* check = app.add_subcommand("check", "solve and run the structural checks");
  common(check, true);
  check->add_option("--method", cfg.method, "pi or vi")->check(CLI::IsMember({"pi", "vi"}));

  auto* enumerate = app.add_subcommand("enumerate", "enumerate monotone policies");
  common(enumerate, true);
  enumerate->add_option("--family", family, "queue or battery")->required();
  enumerate->add_flag("--count-only", cfg.count_only, "print the count without enumerating");
  enumerate->add_flag("--list", cfg.list, "write every policy to policies.csv");
  enumerate->add_option("--budget", cfg.budget, "refuse spaces larger than this");

  auto* best = app.add_subcommand("best-monotone", "exhaustive best monotone policy and its gap");
  common(best, true);
  best->add_option("--family", family, "queue or battery")->required();
  best->add_option("--budget", cfg.budget, "refuse spaces larger than this");

  auto* greedy = app.add_subcommand("greedy-gap", "gap of the greedy policy");
  common(greedy, true);

  for (auto* sub : {best, greedy}) {
    sub->add_option("--mc-trajectories", cfg.mc_trajectories, "Monte-Carlo check of V(0,0)");
    sub->add_option("--seed", cfg.seed, "Monte-Carlo seed");
  }

  auto* reproduce = app.add_subcommand("reproduce", "run the counterexample presets");
  common(reproduce, false);
  reproduce->add_option("--preset", cfg.presets, "preset name (repeatable; default all)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? exit_code::kOk : exit_code::kValidation;
  }

  try {
    cfg.format = format == "csv" ? OutputFormat::kCsv : OutputFormat::kText;
    if (!family.empty()) cfg.family = parse_family(family);
    const std::pair<CLI::App*, Command> table[] = {
        {solve, Command::kSolve},         {check, Command::kCheck},         {enumerate, Command::kEnumerate},
        {best, Command::kBestMonotone}, {greedy, Command::kGreedyGap}, {reproduce, Command::kReproduce}};
    for (const auto& [sub, command] : table)
      if (*sub) cfg.command = command;
    switch (cfg.command) {
      case Command::kSolve: return cmd_solve(cfg, out, false);
      case Command::kCheck: return cmd_solve(cfg, out, true);
      case Command::kEnumerate: return cmd_enumerate(cfg, out);
      case Command::kBestMonotone: return cmd_gap(cfg, out, true);
      case Command::kGreedyGap: return cmd_gap(cfg, out, false);
      case Command::kReproduce: return cmd_reproduce(cfg, out);
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kValidation;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kValidation;
  } catch (const BudgetExceeded& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kValidation;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kValidation;
  }
  return exit_code::kValidation;
}

}  // namespace ehsched
