#ifndef LIMREG_SEARCH_HPP
#define LIMREG_SEARCH_HPP

#include <cstdint>
#include <vector>

#include "limreg/predictors.hpp"
#include "limreg/problem.hpp"

namespace limreg {

/// Finite approximation of the state space: one sorted value list per covariate.
class StateGrid {
 public:
  explicit StateGrid(std::vector<std::vector<Rational>> values);
  /// The same list {0, step, 2 step, ..., 1} for each of n covariates.
  static StateGrid uniform(const Rational& step, std::size_t n);
  /// The same explicit list for each of n covariates.
  static StateGrid repeated(std::vector<Rational> values, std::size_t n);

  [[nodiscard]] const std::vector<std::vector<Rational>>& values() const { return values_; }
  [[nodiscard]] std::size_t dimension() const { return values_.size(); }
  [[nodiscard]] std::uint64_t count() const;
  /// State number `index` in lexicographic order (last covariate fastest).
  [[nodiscard]] State at(std::uint64_t index) const;

 private:
  std::vector<std::vector<Rational>> values_;
};

std::vector<State> enumerate_states(const StateGrid& grid);

/// Limit predictions for every grid state, computed once and shared across thresholds.
struct PredictionTable {
  std::vector<State> states;
  std::vector<Predictions> predictions;
};

PredictionTable tabulate_predictions(const Problem& problem, const PredictorSpec& spec,
                                     const StateGrid& grid, int threads = 1,
                                     const LogitSolverSettings& settings = {});

RegretReport max_regret(const Problem& problem, const PredictionTable& table,
                        const ThresholdPolicy& policy, int threads = 1);
RegretReport max_regret(const Problem& problem, const PredictorSpec& spec,
                        const ThresholdPolicy& policy, const StateGrid& grid, int threads = 1);

enum class ThresholdMode { Invariant, PerCovariate };

/// Candidate thresholds. Invariant mode uses `invariant`; per-covariate mode
/// uses `per_covariate` when set, else `invariant` for every covariate.
/// `include_force` appends ForceA and ForceB to each list.
struct ThresholdGrid {
  std::vector<Rational> invariant;
  std::vector<std::vector<Rational>> per_covariate;
  bool include_force = false;
};

inline constexpr std::uint64_t kDefaultPolicyCap = 1'000'000;

/// Every candidate policy in enumeration order; throws BudgetError above `cap`.
std::vector<ThresholdPolicy> enumerate_policies(const ThresholdGrid& grid, ThresholdMode mode,
                                                std::size_t n, std::uint64_t cap = kDefaultPolicyCap);

struct SearchRow {
  ThresholdPolicy policy;
  RegretReport report;
};

struct SearchResult {
  ThresholdPolicy best_thresholds;
  Rational mmr;
  std::vector<SearchRow> per_threshold_mr;
};

struct SearchOptions {
  int threads = 1;
  std::uint64_t policy_cap = kDefaultPolicyCap;
  LogitSolverSettings solver;
};

/// Thresholds are fixed first, then the worst grid state is found for each;
/// returns the first minimizing policy in enumeration order.
SearchResult minimize_over_thresholds(const Problem& problem, const PredictorSpec& spec,
                                      const StateGrid& grid, const ThresholdGrid& thresholds,
                                      ThresholdMode mode, const SearchOptions& options = {});

/// Minimax regret without data: sum of P(x) min(U_xB, 1 - U_xB).
Rational no_data_mmr(const Problem& problem);

/// Treatment minimizing maximum regret when p_x is only known to lie in [p_min, p_max].
Action no_data_decision(const Rational& welfare_b, const Rational& p_min, const Rational& p_max);

struct MedianThreshold {
  Rational t;
  Rational objective;
};

/// Minimizes sum of P(x) |(1 - U_xB) - t| over t (weighted median; midpoint
/// of the median interval when it is not unique).
MedianThreshold weighted_median_threshold(const Problem& problem);

}  // namespace limreg

#endif  // LIMREG_SEARCH_HPP
