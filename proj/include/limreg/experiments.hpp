#ifndef LIMREG_EXPERIMENTS_HPP
#define LIMREG_EXPERIMENTS_HPP

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "limreg/config.hpp"

namespace limreg {

struct ResultRow {
  std::string welfare_id;
  std::string predictor;
  std::string threshold;
  std::optional<Rational> mr_exact;
  double mr_value = 0.0;
  std::string argmax_state;
  /// grid, closed_form or mc
  std::string method;
  int boundary_events = 0;
};

struct ResultTable {
  std::vector<ResultRow> rows;
  std::vector<std::string> footnotes;
  /// Run metadata: config hash, grid sizes, solver settings, seeds, per-row detail.
  nlohmann::json manifest = nlohmann::json::object();
  /// False when a verification run found a failing case.
  bool passed = true;
};

struct RunOptions {
  int threads = 1;
};

/// No-data MMR plus every (welfare, predictor, threshold) cell. The correct
/// predictor uses the continuous closed form; the rest use grid search.
ResultTable run_table2(const ExperimentConfig& config, const RunOptions& options = {});
/// Closed form against exhaustive search for each binary configuration.
ResultTable run_table1_verify(const ExperimentConfig& config, const RunOptions& options = {});
/// Best threshold policy per predictor, with the no-data baseline.
ResultTable run_mmr(const ExperimentConfig& config, const RunOptions& options = {});
/// Finite-sample MR per (N, estimator, threshold) next to its limit value.
ResultTable run_mc(const ExperimentConfig& config, const RunOptions& options = {});
/// Grid MR for every configured (welfare, predictor, policy).
ResultTable run_compute(const ExperimentConfig& config, const RunOptions& options = {});

/// Draws random binary configurations: P0, U0, U1 uniform on {1/1000, ..., 999/1000}.
std::vector<BinaryCase> random_binary_cases(int count, std::uint64_t seed);

/// Columns: welfare_id, predictor, threshold, mr_decimal, mr_exact, argmax_state, method, boundary_events.
std::string render_csv(const ResultTable& table);
std::string render_markdown(const ResultTable& table);

/// At least ten decimal places; exact values are truncated long division.
std::string format_mr(const ResultRow& row);

}  // namespace limreg

#endif  // LIMREG_EXPERIMENTS_HPP
