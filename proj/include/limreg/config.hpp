#ifndef LIMREG_CONFIG_HPP
#define LIMREG_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "limreg/predictors.hpp"
#include "limreg/search.hpp"

namespace limreg {

struct WelfareSpec {
  std::string id;
  std::vector<Rational> values;
  friend bool operator==(const WelfareSpec&, const WelfareSpec&) = default;
};

struct McConfig {
  std::vector<std::uint64_t> sample_sizes{100, 1000, 10000};
  int reps = 2000;
  std::uint64_t seed = 1;
  std::vector<std::string> estimators{"marginal-mean"};
  std::uint64_t draw_budget = 5'000'000'000ULL;
  friend bool operator==(const McConfig&, const McConfig&) = default;
};

struct BinaryCase {
  Rational p0;
  Rational u0;
  Rational u1;
  friend bool operator==(const BinaryCase&, const BinaryCase&) = default;
};

struct Table1Config {
  std::vector<BinaryCase> cases;
  int random = 0;
  std::uint64_t seed = 7;
  Rational step{1, 400};
  friend bool operator==(const Table1Config&, const Table1Config&) = default;
};

/// Everything a run needs. Probabilities and welfare are exact fractions.
struct ExperimentConfig {
  std::vector<Rational> covariates;
  std::vector<Rational> weights;
  std::vector<WelfareSpec> welfare;
  /// One value list per covariate.
  std::vector<std::vector<Rational>> grid;
  std::vector<PredictorSpec> predictors;
  std::vector<Rational> thresholds;
  std::vector<std::vector<Rational>> per_covariate_thresholds;
  bool include_force = false;
  ThresholdMode mode = ThresholdMode::Invariant;
  std::uint64_t policy_cap = kDefaultPolicyCap;
  std::optional<McConfig> mc;
  std::optional<Table1Config> table1;
  std::string output_path;
  std::string format = "csv";

  [[nodiscard]] Problem problem(std::size_t welfare_index) const;
  [[nodiscard]] StateGrid state_grid() const;
  [[nodiscard]] ThresholdGrid threshold_grid() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Throws ConfigError on schema violations, naming the offending key.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);
/// Canonical JSON form; parse_config(render_config(c)) == c.
nlohmann::json render_config(const ExperimentConfig& config);
/// FNV-1a over the canonical JSON text minus the output block, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

/// Uniform P on {0,1,2,3}; four welfare specs; 5-point grid; thresholds 1/8..7/8;
/// marginal-mean, linear, logit and correct predictors.
ExperimentConfig table2_preset();
/// 200 seeded random binary configurations at step 1/400.
ExperimentConfig table1_preset();
/// Binary x with P = 1/2, U = (4/5, 1/5), correct predictor, invariant thresholds.
ExperimentConfig mmr_preset();
/// table2 problem with U = 1/2, t = 1/2, marginal-mean estimator, N = 100 and 1000.
ExperimentConfig mc_preset();

}  // namespace limreg

#endif  // LIMREG_CONFIG_HPP
