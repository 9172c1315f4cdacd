// hubloc command-line interface.
//
// Exit codes: 0 success / optimal, 1 input or usage error, 2 infeasible.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "hubloc/hubloc.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitInfeasible = 2;

std::string format_value(double v, bool full) {
  char buf[64];
  if (full) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }
  if (v == 0.0 || !std::isfinite(v)) {
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
  }
  // 6 significant digits without switching to exponent form for large money values.
  const int mag = static_cast<int>(std::floor(std::log10(std::abs(v))));
  if (mag >= 15 || mag < -4) {
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
  }
  const double unit = std::pow(10.0, mag - 5);
  const double rounded = std::round(v / unit) * unit;
  std::snprintf(buf, sizeof buf, "%.*f", std::max(0, 5 - mag), rounded);
  return buf;
}

struct Common {
  std::string instance;
  std::optional<double> alpha, beta, delta;
  bool no_prune = false;
  std::size_t threads = 0;
  bool full_precision = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("instance", c.instance, "Instance file (JSON)")->required();
  cmd->add_option("--alpha", c.alpha, "Override the transfer coefficient");
  cmd->add_option("--beta", c.beta, "Override the collection coefficient");
  cmd->add_option("--delta", c.delta, "Override the distribution coefficient");
  cmd->add_flag("--no-prune", c.no_prune, "Disable capacity and bound pruning");
  cmd->add_option("--threads", c.threads, "Worker threads (0: available parallelism)");
  cmd->add_flag("--full-precision", c.full_precision, "Print values with 17 significant digits");
}

hubloc::Instance load(const Common& c) {
  auto inst = hubloc::load_instance(c.instance);
  if (c.alpha) inst.coefficients.alpha = *c.alpha;
  if (c.beta) inst.coefficients.beta = *c.beta;
  if (c.delta) inst.coefficients.delta = *c.delta;
  hubloc::require_valid(inst);
  return inst;
}

hubloc::SearchConfig search_config(const Common& c) {
  hubloc::SearchConfig cfg;
  cfg.enable_pruning = !c.no_prune;
  cfg.threads = c.threads;
  return cfg;
}

int cmd_validate(const std::string& path) {
  const auto inst = hubloc::load_instance(path);
  std::cout << "valid: " << inst.name << " n=" << inst.size() << " demand_scenarios=" << inst.demand_scenarios.size()
            << " setup_scenarios=" << inst.setup_scenarios.size() << " checksum=" << std::hex
            << hubloc::instance_checksum(inst) << std::dec << '\n';
  return kExitOk;
}

struct SolveArgs {
  Common common;
  std::string mode = "deterministic";
  std::size_t scenario = 1;
  std::string out;
  std::uint64_t seed = 0;
  bool no_timestamp = false;
};

int cmd_solve(const SolveArgs& a) {
  const auto inst = load(a.common);
  const auto cfg = search_config(a.common);
  const bool full = a.common.full_precision;
  const hubloc::WriteOptions wopt{!a.no_timestamp};
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };

  if (a.mode == "minimax") {
    const auto rep = hubloc::solve_minimax_regret(inst, cfg);
    if (!a.out.empty()) hubloc::write_solution(rep, a.out, wopt);
    if (rep.solution.status != hubloc::SolveStatus::optimal) {
      std::cerr << "infeasible: " << rep.diagnostic << '\n';
      return kExitInfeasible;
    }
    std::cout << "hubs: " << hubloc::hub_list(rep.solution.hub_set) << " max_regret: "
              << format_value(rep.max_regret, full) << '\n';
    std::cout << "names: " << hubloc::hub_names(inst, rep.solution.hub_set) << '\n';
    for (std::size_t t = 0; t < rep.regrets.size(); ++t)
      std::cout << "  s" << t + 1 << ": Z*=" << format_value(rep.scenario_optima[t], full)
                << " regret=" << format_value(rep.regrets[t], full) << '\n';
    std::cout << "time: " << elapsed() << " s\n";
    return kExitOk;
  }

  hubloc::Solution sol;
  if (a.mode == "deterministic") {
    sol = hubloc::solve_deterministic(inst, hubloc::expected_demand(inst), hubloc::mean_setup(inst), cfg);
  } else if (a.mode == "scenario") {
    if (a.scenario < 1 || a.scenario > inst.setup_scenarios.size())
      throw hubloc::InputError("setup scenario index out of range");
    sol = hubloc::solve_scenario(inst, a.scenario - 1, cfg);
  } else {
    throw hubloc::InputError("unknown mode '" + a.mode + "'");
  }
  if (!a.out.empty()) hubloc::write_solution(sol, a.out, wopt);
  if (sol.status != hubloc::SolveStatus::optimal) {
    std::cerr << "infeasible: no hub set satisfies the capacity constraints\n";
    return kExitInfeasible;
  }
  std::cout << "hubs: " << hubloc::hub_list(sol.hub_set) << " objective: " << format_value(sol.objective, full) << '\n';
  std::cout << "names: " << hubloc::hub_names(inst, sol.hub_set) << '\n';
  std::cout << "flow_cost: " << format_value(sol.flow_cost, full) << " setup_cost: " << format_value(sol.setup_cost, full)
            << '\n';
  std::cout << "time: " << elapsed() << " s\n";
  return kExitOk;
}

struct Table3Args {
  Common common;
  std::vector<double> alphas{0.3, 0.5, 0.7, 1.0};
};

int cmd_table3(const Table3Args& a) {
  auto inst = load(a.common);
  const auto cfg = search_config(a.common);
  const bool full = a.common.full_precision;
  const std::size_t ns = inst.setup_scenarios.size();
  // rows: BDM, s_f1..s_fT, MRM; cells: (cost, hubs)
  std::vector<std::vector<std::pair<std::string, std::string>>> cells(ns + 2);
  bool any_infeasible = false;
  for (double alpha : a.alphas) {
    inst.coefficients.alpha = alpha;
    hubloc::require_valid(inst);
    auto cell = [&](const hubloc::Solution& s) -> std::pair<std::string, std::string> {
      if (s.status != hubloc::SolveStatus::optimal) {
        any_infeasible = true;
        return {"infeasible", "-"};
      }
      return {format_value(s.objective, full), hubloc::hub_list(s.hub_set)};
    };
    cells[0].push_back(cell(hubloc::solve_deterministic(inst, hubloc::expected_demand(inst), hubloc::mean_setup(inst), cfg)));
    for (std::size_t t = 0; t < ns; ++t) cells[t + 1].push_back(cell(hubloc::solve_scenario(inst, t, cfg)));
    const auto rep = hubloc::solve_minimax_regret(inst, cfg);
    auto mrm = cell(rep.solution);
    if (rep.solution.status == hubloc::SolveStatus::optimal) mrm.first = "-";
    cells[ns + 1].push_back(mrm);
  }
  std::ostringstream os;
  os << "model";
  for (double alpha : a.alphas) os << "\talpha=" << alpha << " cost\thubs";
  os << '\n';
  for (std::size_t r = 0; r < cells.size(); ++r) {
    os << (r == 0 ? std::string("BDM") : r == ns + 1 ? std::string("MRM") : "s_f" + std::to_string(r));
    for (const auto& [cost, hubs] : cells[r]) os << '\t' << cost << '\t' << hubs;
    os << '\n';
  }
  std::cout << os.str();
  return any_infeasible ? kExitInfeasible : kExitOk;
}

struct BreakEvenArgs {
  Common common;
  double horizon_days = 360.0;
  double season_days = 90.0;
  double phi_max = 0.05;
  double phi_step = 0.001;
  std::string basis = "installed";
  std::string out;
};

int cmd_breakeven(const BreakEvenArgs& a) {
  const auto inst = load(a.common);
  const auto cfg = search_config(a.common);
  hubloc::PolicyOptions opt;
  opt.season_days = a.season_days;
  if (a.basis == "installed") opt.basis = hubloc::ReconfigBasis::installed_configuration;
  else if (a.basis == "all") opt.basis = hubloc::ReconfigBasis::all_configurations;
  else throw hubloc::InputError("unknown basis '" + a.basis + "' (expected installed or all)");
  const auto rep = hubloc::break_even(inst, a.horizon_days, hubloc::phi_grid(a.phi_max, a.phi_step), opt, cfg);

  if (!a.out.empty()) {
    std::ofstream f(a.out, std::ios::trunc);
    if (!f) throw hubloc::InputError("cannot write '" + a.out + "'");
    hubloc::write_break_even_table(f, rep);
  }
  const bool full = a.common.full_precision;
  for (std::size_t s = 0; s < rep.seasonal.season_solutions.size(); ++s)
    std::cout << "season " << s + 1 << ": hubs " << hubloc::hub_list(rep.seasonal.season_solutions[s].hub_set) << " ("
              << hubloc::hub_names(inst, rep.seasonal.season_solutions[s].hub_set) << ")\n";
  std::cout << "minimax: hubs " << hubloc::hub_list(rep.fixed.solution.hub_set) << " ("
            << hubloc::hub_names(inst, rep.fixed.solution.hub_set) << ")\n";
  std::cout << "seasonal(0): " << format_value(rep.seasonal.cost(0.0), full)
            << " slope: " << format_value(rep.seasonal.slope, full)
            << " reconfigurations: " << rep.seasonal.reconfiguration_events << '\n';
  std::cout << "fixed: " << format_value(rep.fixed.cost(), full) << '\n';
  if (rep.break_even) {
    std::cout << "phi*: " << format_value(*rep.break_even, full) << '\n';
  } else if (rep.seasonal.slope == 0.0) {
    std::cout << "no crossing (curves parallel)\n";
  } else if (rep.raw_crossing) {
    std::cout << "no crossing in [" << rep.grid.front().phi << ", " << rep.grid.back().phi
              << "] (affine intersection at phi=" << format_value(*rep.raw_crossing, full) << ")\n";
  } else {
    std::cout << "no crossing\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Capacitated multiple-allocation hub location under demand and setup-cost uncertainty"};
  app.require_subcommand(1);

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check an instance file");
  validate->add_option("instance", validate_path, "Instance file (JSON)")->required();

  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "Solve one model");
  add_common(solve, solve_args.common);
  solve->add_option("--mode", solve_args.mode, "deterministic | scenario | minimax")
      ->check(CLI::IsMember({"deterministic", "scenario", "minimax"}));
  solve->add_option("--scenario", solve_args.scenario, "Setup scenario (1-based) for --mode scenario");
  solve->add_option("--out", solve_args.out, "Write the solution document here");
  solve->add_option("--seed", solve_args.seed, "Reserved; exact search is deterministic");
  solve->add_flag("--no-timestamp", solve_args.no_timestamp, "Omit the timestamp field from --out");

  Table3Args t3;
  auto* table3 = app.add_subcommand("table3", "Deterministic, per-scenario and minimax grid over alpha");
  add_common(table3, t3.common);
  table3->add_option("--alphas", t3.alphas, "Transfer coefficients to tabulate")->delimiter(',');

  BreakEvenArgs be;
  auto* breakeven = app.add_subcommand("breakeven", "Seasonal re-optimization versus the minimax network");
  add_common(breakeven, be.common);
  breakeven->add_option("--horizon-days", be.horizon_days, "Comparison horizon in days");
  breakeven->add_option("--season-days", be.season_days, "Days represented by one demand scenario");
  breakeven->add_option("--phi-max", be.phi_max, "Largest phi on the grid");
  breakeven->add_option("--phi-step", be.phi_step, "Grid spacing");
  breakeven->add_option("--basis", be.basis, "Re-configuration basis: installed | all");
  breakeven->add_option("--out", be.out, "Write the tab-delimited phi table here");

  app.add_subcommand("schema", "Print the document schemas");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*validate) return cmd_validate(validate_path);
    if (*solve) return cmd_solve(solve_args);
    if (*table3) return cmd_table3(t3);
    if (*breakeven) return cmd_breakeven(be);
    std::cout << hubloc::schema_text();
    return kExitOk;
  } catch (const hubloc::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const hubloc::SearchLimitError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
}
