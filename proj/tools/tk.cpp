#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "tklab/io.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitClaimFail = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitError = 3;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw tklab::IoError("cannot open scenario", path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

tklab::Scenario load_scenario(const std::string& path,
                              const std::vector<std::string>& overrides) {
  std::string text = slurp(path);
  if (!overrides.empty()) text = tklab::apply_overrides(text, overrides);
  return tklab::parse_scenario(text);
}

void print_verdicts(const tklab::VerificationReport& report) {
  for (const auto& v : report.verdicts) {
    std::cout << (v.pass ? "[PASS] " : "[FAIL] ") << v.claim_id
              << "  measured=" << v.measured << " bound=" << v.bound
              << " tol=" << v.tolerance;
    if (!v.notes.empty()) std::cout << "  (" << v.notes << ")";
    std::cout << "\n";
  }
}

int run_and_report(const tklab::Scenario& scenario,
                   const std::string& out_dir) {
  tklab::RunResult result = tklab::run_scenario(scenario);
  std::filesystem::create_directories(out_dir);
  const auto base = std::filesystem::path(out_dir) / scenario.name;
  tklab::write_trajectory_csv(result.trajectory,
                              base.string() + ".trajectory.csv");
  tklab::write_report_json(result.report, base.string() + ".report.json");
  print_verdicts(result.report);
  std::cout << "wrote " << base.string() << ".{trajectory.csv,report.json}\n";
  return result.report.all_pass() ? kExitPass : kExitClaimFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"thermodynamic Kuramoto laboratory"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir = ".", claims_arg, param_key,
              values_arg, csv_path, channels_arg = "phase_diameter",
              svg_path = "plot.svg", claim_id;
  std::vector<std::string> overrides;
  int trials = 100;
  std::uint64_t seed = 1;
  bool log_scale = false;

  auto* run = app.add_subcommand("run", "run a scenario and verify its claims");
  run->add_option("scenario", scenario_path)->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--set", overrides, "override section.key=value");

  auto* verify =
      app.add_subcommand("verify", "run a scenario against a claim list");
  verify->add_option("scenario", scenario_path)->required();
  verify->add_option("--claims", claims_arg, "comma-separated claim ids")
      ->required();
  verify->add_option("--out", out_dir, "output directory");
  verify->add_option("--set", overrides, "override section.key=value");

  auto* sweep = app.add_subcommand("sweep", "run a scenario over a value list");
  sweep->add_option("scenario", scenario_path)->required();
  sweep->add_option("--param", param_key, "section.key to vary")->required();
  sweep->add_option("--values", values_arg, "comma-separated values")
      ->required();
  sweep->add_option("--out", out_dir, "output directory");
  sweep->add_option("--set", overrides, "override section.key=value");

  auto* mc = app.add_subcommand("montecarlo", "randomized claim campaign");
  mc->add_option("claim", claim_id)->required();
  mc->add_option("--trials", trials);
  mc->add_option("--seed", seed);
  mc->add_option("--out", out_dir, "output directory");

  auto* plot = app.add_subcommand("plot", "render trajectory channels as SVG");
  plot->add_option("trajectory", csv_path)->required();
  plot->add_option("--channels", channels_arg, "comma-separated channels");
  plot->add_option("--svg", svg_path, "output file");
  plot->add_flag("--log", log_scale, "log10 vertical scale");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return run_and_report(load_scenario(scenario_path, overrides), out_dir);
    }
    if (verify->parsed()) {
      tklab::Scenario scenario = load_scenario(scenario_path, overrides);
      scenario.claims = split_commas(claims_arg);
      return run_and_report(scenario, out_dir);
    }
    if (sweep->parsed()) {
      int exit_code = kExitPass;
      int index = 0;
      for (const auto& value : split_commas(values_arg)) {
        std::vector<std::string> all = overrides;
        all.push_back(param_key + "=" + value);
        tklab::Scenario scenario = load_scenario(scenario_path, all);
        scenario.name += "_" + std::to_string(index++);
        std::cout << "--- " << param_key << " = " << value << "\n";
        exit_code = std::max(exit_code, run_and_report(scenario, out_dir));
      }
      return exit_code;
    }
    if (mc->parsed()) {
      tklab::AggregateReport report =
          tklab::monte_carlo(claim_id, trials, seed);
      std::filesystem::create_directories(out_dir);
      const auto path = std::filesystem::path(out_dir) /
                        (claim_id + ".montecarlo.json");
      tklab::write_aggregate_json(report, path.string());
      std::cout << claim_id << ": " << report.n_pass << "/" << report.n_trials
                << " pass, worst margin " << report.worst_margin << "\n"
                << "wrote " << path.string() << "\n";
      return report.n_pass == report.n_trials ? kExitPass : kExitClaimFail;
    }
    if (plot->parsed()) {
      tklab::TkTrajectory traj = tklab::read_trajectory_csv(csv_path);
      tklab::PlotOptions opts;
      opts.log_scale = log_scale;
      tklab::plot_svg(traj, split_commas(channels_arg), svg_path, opts);
      std::cout << "wrote " << svg_path << "\n";
      return kExitPass;
    }
  } catch (const tklab::InfeasibleScenarioError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const tklab::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
