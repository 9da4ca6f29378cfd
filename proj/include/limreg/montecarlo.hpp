#ifndef LIMREG_MONTECARLO_HPP
#define LIMREG_MONTECARLO_HPP

#include <cstdint>
#include <limits>
#include <vector>

#include "limreg/predictors.hpp"
#include "limreg/problem.hpp"
#include "limreg/search.hpp"

namespace limreg {

/// Counter-based generator: output k of stream `key` is splitmix64(key + k * golden).
/// Satisfies UniformRandomBitGenerator.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  explicit SplitMix64(std::uint64_t key) : state_(key) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

 private:
  std::uint64_t state_;
};

std::uint64_t mix64(std::uint64_t v);
/// Stream key for one (seed, state, replication) triple.
std::uint64_t stream_key(std::uint64_t seed, std::uint64_t state_index, std::uint64_t replication);

/// Joint law P_s(y, x): covariates from problem weights, outcomes from the state.
struct SamplingLaw {
  Problem problem;
  State state;
};

struct Observation {
  /// Covariate position in problem order.
  std::size_t x;
  int y;
};

/// N i.i.d. draws: x by inverse CDF over the weights, then y ~ Bernoulli(p_sx).
std::vector<Observation> draw_sample(const SamplingLaw& law, std::size_t n, std::uint64_t key);

enum class Estimator { MarginalMean, LinearLS, LogitLS };

const char* to_string(Estimator e);
Estimator parse_estimator(const std::string& name);

/// Plug-in predictions for every covariate from one sample.
/// Linear and logit fits need two distinct observed covariates (DegenerateDesign otherwise).
Predictions sample_estimate(const std::vector<Observation>& sample, Estimator estimator,
                            const Problem& problem, const LogitSolverSettings& settings = {});

/// One replication: the sample's population regret and per-covariate errors.
struct Replication {
  bool skipped = false;
  bool unconverged = false;
  StateRegret regret;
  std::vector<int> errors;
};

Replication replicate(const Problem& problem, const State& state, Estimator estimator,
                      const ThresholdPolicy& policy, std::size_t n, std::uint64_t seed,
                      std::uint64_t state_index, std::uint64_t replication);

struct MCEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  /// Replications that produced an estimate.
  int reps = 0;
  /// Replications dropped for a degenerate design.
  int skipped = 0;
  int unconverged = 0;
  std::uint64_t seed = 0;
  /// Share of used replications with a wrong decision at each covariate.
  std::vector<double> error_frequency;
  /// Mean regret contribution of each covariate.
  std::vector<double> per_covariate;
};

MCEstimate expected_regret_mc(const Problem& problem, const State& state, Estimator estimator,
                              const ThresholdPolicy& policy, std::size_t n, int reps,
                              std::uint64_t seed, int threads = 1, std::uint64_t state_index = 0);

struct FiniteSampleMR {
  MCEstimate estimate;
  State argmax;
  std::uint64_t argmax_index = 0;
};

inline constexpr std::uint64_t kDefaultDrawBudget = 5'000'000'000ULL;

/// Largest replication-mean regret over the grid. Refuses with BudgetError
/// when states x reps x n exceeds `draw_budget`.
FiniteSampleMR finite_sample_mr(const Problem& problem, Estimator estimator,
                                const ThresholdPolicy& policy, const StateGrid& grid, std::size_t n,
                                int reps, std::uint64_t seed, int threads = 1,
                                std::uint64_t draw_budget = kDefaultDrawBudget);

}  // namespace limreg

#endif  // LIMREG_MONTECARLO_HPP
