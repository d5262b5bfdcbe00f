// Command-line front end: simulate, analyze and sweep scenario files.

#include "swivel/batch.hpp"
#include "swivel/errors.hpp"
#include "swivel/simulation.hpp"
#include "swivel/stability.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace {

constexpr int kExitScenario = 2;
constexpr int kExitDivergence = 3;

using namespace swivel;

int simulate(const std::string& file, const std::string& out_dir,
             std::optional<std::uint64_t> seed) {
  Scenario sc = load_scenario(file);
  if (seed) sc.seed = *seed;
  const RunResult res = run_scenario(sc);

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  write_telemetry((dir / "telemetry.csv").string(), res.telemetry);
  std::ofstream metrics(dir / "metrics.json");
  metrics << metrics_json(res.metrics) << '\n';
  if (!metrics) throw Error(ErrorCode::IoError, "cannot write metrics.json");

  std::cout << metrics_json(res.metrics) << '\n';
  if (res.metrics.halt) {
    std::cerr << "run halted at t=" << res.metrics.halt->t << ": " << res.metrics.halt->message
              << '\n';
    return kExitDivergence;
  }
  return 0;
}

int analyze(const std::string& file) {
  const Scenario sc = load_scenario(file);
  const Mat3 j = nominal_inertia(sc.vehicle);
  const auto reports = classify_equilibria(sc.gains, j);

  std::cout << "equilibrium,index,re,im\n";
  for (std::size_t k = 0; k < reports.size(); ++k) {
    for (std::size_t i = 0; i < reports[k].eigenvalues.size(); ++i) {
      const auto& l = reports[k].eigenvalues[i];
      std::cout << k << ',' << i << ',' << format_double(l.real()) << ','
                << format_double(l.imag()) << '\n';
    }
  }
  std::cout << '\n';
  for (std::size_t k = 0; k < reports.size(); ++k) {
    std::cout << "equilibrium " << k << ": " << to_string(reports[k].kind) << " ("
              << reports[k].n_stable << " stable eigenvalues)\n";
  }

  const GainRuleReport rules = check_gain_rules(sc.gains, j);
  auto verdict = [](bool ok) { return ok ? "PASS" : "FAIL"; };
  std::cout << verdict(rules.overdamped_inner) << " inner loop overdamped (zeta >= 1)\n"
            << verdict(rules.inner_stiffer) << " inner loop stiffer: min Omega^2 = "
            << rules.inner_stiffness_min << " > outer " << rules.outer_stiffness_max << '\n'
            << verdict(rules.outer_non_oscillatory)
            << " outer loop non-oscillatory: max |Im| = " << rules.outer_max_imag << '\n';
  return rules.all_pass() ? 0 : 1;
}

int run_sweep(const std::string& file, const std::string& param,
              const std::vector<double>& values) {
  const Scenario sc = load_scenario(file);
  const auto rows = sweep(sc, param, values);
  write_sweep_csv(std::cout, rows);
  for (const SweepRow& r : rows) {
    if (r.metrics.halt) return kExitDivergence;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Swivel-wing attitude control simulator"};
  app.require_subcommand(1);

  std::string file;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  auto* sim = app.add_subcommand("simulate", "Run a scenario, write telemetry.csv and metrics.json");
  sim->add_option("scenario", file, "Scenario file")->required();
  sim->add_option("--out", out_dir, "Output directory");
  sim->add_option("--seed", seed, "Override the scenario seed");

  auto* an = app.add_subcommand("analyze", "Equilibrium eigenvalues and gain-rule report");
  an->add_option("scenario", file, "Scenario file")->required();

  std::string param;
  std::vector<double> values;
  auto* sw = app.add_subcommand("sweep", "Run a scenario once per parameter value");
  sw->add_option("scenario", file, "Scenario file")->required();
  sw->add_option("--param", param, "Numeric scenario key")->required();
  sw->add_option("--values", values, "Comma-separated values")->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) return simulate(file, out_dir, seed);
    if (*an) return analyze(file);
    return run_sweep(file, param, values);
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::ParseError:
      case ErrorCode::IoError:
      case ErrorCode::UnknownParameter:
      case ErrorCode::InvalidArgument:
      case ErrorCode::DegenerateP:
      case ErrorCode::NonHyperbolic:
        return kExitScenario;
      default:
        return kExitDivergence;
    }
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return kExitScenario;
  }
}
