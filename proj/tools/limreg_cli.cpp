// limreg: limit and finite-sample maximum regret of plug-in treatment rules.
//
//   limreg table2 [--config cfg.json] [--out table2.csv] [--threads 4]
//   limreg table1-verify --seed 7
//   limreg mmr --threshold-mode per-covariate
//   limreg mc --seed 3 --format md
//   limreg compute --config cfg.json --grid-step 1/8
//
// Exit codes: 0 ok, 1 verification failure, 2 config/schema error,
// 3 solver non-convergence, 4 budget refusal.

#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>

#include "CLI11.hpp"
#include "limreg/experiments.hpp"
#include "limreg/montecarlo.hpp"

namespace {

using namespace limreg;

struct Flags {
  std::string config;
  std::string out;
  std::string format;
  int threads = 1;
  std::optional<std::uint64_t> seed;
  std::string grid_step;
  std::string threshold_mode;
};

ExperimentConfig resolve(const Flags& flags, const std::function<ExperimentConfig()>& preset) {
  auto config = flags.config.empty() ? preset() : load_config(flags.config);
  if (!flags.grid_step.empty()) {
    Rational step;
    try {
      step = Rational::parse(flags.grid_step);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("--grid-step: ") + e.what());
    }
    if (config.table1 && step.num() == 1) config.table1->step = step;
    config.grid = StateGrid::uniform(step, config.covariates.size()).values();
  }
  if (!flags.threshold_mode.empty()) {
    if (flags.threshold_mode == "invariant") {
      config.mode = ThresholdMode::Invariant;
    } else if (flags.threshold_mode == "per-covariate") {
      config.mode = ThresholdMode::PerCovariate;
    } else {
      throw ConfigError("--threshold-mode: expected invariant or per-covariate");
    }
  }
  if (flags.seed) {
    if (config.mc) config.mc->seed = *flags.seed;
    if (config.table1) config.table1->seed = *flags.seed;
  }
  if (!flags.format.empty()) config.format = flags.format;
  if (!flags.out.empty()) config.output_path = flags.out;
  return config;
}

void emit(const ResultTable& table, const ExperimentConfig& config) {
  const auto text = config.format == "md" ? render_markdown(table) : render_csv(table);
  if (config.output_path.empty()) {
    std::cout << text;
    if (config.format != "md") {
      for (const auto& f : table.footnotes) std::cerr << "note: " << f << '\n';
    }
    return;
  }
  std::ofstream(config.output_path, std::ios::binary) << text;
  auto manifest = table.manifest;
  manifest["footnotes"] = table.footnotes;
  std::ofstream(config.output_path + ".manifest.json", std::ios::binary) << manifest.dump(2) << '\n';
  std::cerr << "wrote " << config.output_path << " (" << table.rows.size() << " rows)\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Maximum regret of plug-in prediction for binary treatment choice"};
  app.require_subcommand(1);
  Flags flags;
  app.add_option("--config", flags.config, "JSON experiment config (defaults to the command's preset)");
  app.add_option("--out", flags.out, "Output table path; a .manifest.json is written next to it");
  app.add_option("--format", flags.format, "Table format")->check(CLI::IsMember({"csv", "md"}));
  app.add_option("--threads", flags.threads, "Worker threads")->check(CLI::Range(1, 1024));
  app.add_option("--seed", flags.seed, "Seed for Monte Carlo and random binary-case draws");
  app.add_option("--grid-step", flags.grid_step, "Uniform state-grid step as p/q");
  app.add_option("--threshold-mode", flags.threshold_mode, "invariant or per-covariate");

  const std::map<std::string, std::pair<std::function<ExperimentConfig()>,
                                        std::function<ResultTable(const ExperimentConfig&, const RunOptions&)>>>
      commands{
          {"table2", {table2_preset, run_table2}},
          {"table1-verify", {table1_preset, run_table1_verify}},
          {"mmr", {mmr_preset, run_mmr}},
          {"mc", {mc_preset, run_mc}},
          {"compute", {table2_preset, run_compute}},
      };
  for (const auto& [name, _] : commands) app.add_subcommand(name)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    for (const auto& [name, entry] : commands) {
      if (!app.got_subcommand(name)) continue;
      const auto config = resolve(flags, entry.first);
      const auto table = entry.second(config, RunOptions{flags.threads});
      emit(table, config);
      return table.passed ? 0 : 1;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << " (best a=" << e.best().a << ", b=" << e.best().b
              << ", mse=" << e.best().mse << ")\n";
    return 3;
  } catch (const BudgetError& e) {
    std::cerr << "refused: " << e.what() << '\n';
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
