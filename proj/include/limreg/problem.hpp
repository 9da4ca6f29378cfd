#ifndef LIMREG_PROBLEM_HPP
#define LIMREG_PROBLEM_HPP

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "limreg/errors.hpp"
#include "limreg/rational.hpp"

namespace limreg {

enum class Action { A, B };

inline const char* to_string(Action a) { return a == Action::A ? "A" : "B"; }

/// Treatment-choice problem under the neutralizing-treatment normalization:
/// U_x(A,0) = 1, U_x(A,1) = 0 and U_x(B,0) = U_x(B,1) = welfare[x].
class Problem {
 public:
  /// Validates: distinct labels, weights > 0 summing exactly to 1,
  /// every welfare value strictly inside (0, 1).
  Problem(std::vector<Rational> covariates, std::vector<Rational> weights,
          std::vector<Rational> welfare);

  /// Uniform weights over labels 0..n-1.
  static Problem uniform(std::vector<Rational> welfare);

  [[nodiscard]] std::size_t size() const { return covariates_.size(); }
  [[nodiscard]] const std::vector<Rational>& covariates() const { return covariates_; }
  [[nodiscard]] const std::vector<Rational>& weights() const { return weights_; }
  [[nodiscard]] const std::vector<Rational>& welfare() const { return welfare_; }
  /// 1 - U_xB for every covariate, in covariate order.
  [[nodiscard]] const std::vector<Rational>& optimal_thresholds() const { return optimal_; }

  /// Position of covariate label `x`; throws LookupError if absent.
  [[nodiscard]] std::size_t index_of(const Rational& x) const;

 private:
  std::vector<Rational> covariates_;
  std::vector<Rational> weights_;
  std::vector<Rational> welfare_;
  std::vector<Rational> optimal_;
};

/// Unnormalized expected welfares U(c, y) for one covariate value.
struct GeneralWelfare {
  double a0 = 1.0;
  double a1 = 0.0;
  double b0 = 0.0;
  double b1 = 1.0;
};

/// Indifference probability between A and B; requires b1 > a1 and a0 > b0.
double optimal_threshold_general(const GeneralWelfare& w);

/// Exactly 1 - U_xB for covariate label `x`.
Rational optimal_threshold(const Problem& problem, const Rational& x);

/// Conditional event probabilities p_sx, one per covariate.
struct State {
  std::vector<Rational> p;

  friend bool operator==(const State&, const State&) = default;
};

void validate_state(const Problem& problem, const State& state);

/// "0;1/4;1;1/2"
std::string format_state(const State& state);

/// Per-covariate decision threshold. ForceA behaves as t >= 1 and ForceB as
/// t < 0, whatever the prediction.
class ThresholdEntry {
 public:
  enum class Kind { Value, ForceA, ForceB };

  static ThresholdEntry value(Rational t);
  static ThresholdEntry force_a() { return ThresholdEntry(Kind::ForceA, Rational{}); }
  static ThresholdEntry force_b() { return ThresholdEntry(Kind::ForceB, Rational{}); }

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] bool is_value() const { return kind_ == Kind::Value; }
  /// Threshold value; only meaningful for Kind::Value.
  [[nodiscard]] const Rational& t() const { return t_; }
  [[nodiscard]] std::string str() const;

  friend bool operator==(const ThresholdEntry&, const ThresholdEntry&) = default;

 private:
  ThresholdEntry(Kind k, Rational t) : kind_(k), t_(t) {}
  Kind kind_;
  Rational t_;
};

using ThresholdPolicy = std::vector<ThresholdEntry>;

ThresholdPolicy invariant_policy(const Rational& t, std::size_t n);
/// t_x = 1 - U_xB everywhere.
ThresholdPolicy optimal_policy(const Problem& problem);
/// Invariant policies print as the single value, others as "t0;t1;...".
std::string format_policy(const ThresholdPolicy& policy);

/// Tolerance for comparing floating predictions against rational thresholds.
inline constexpr double kTieTolerance = 1e-9;

/// A iff phi <= t. Exact.
Action decide(const Rational& phi, const ThresholdEntry& t);
/// A iff phi <= t + kTieTolerance. Sets *boundary when |phi - t| <= kTieTolerance.
Action decide(double phi, const ThresholdEntry& t, bool* boundary = nullptr);

/// A is optimal iff p <= 1 - U (ties go to A).
inline Action optimal_action(const Rational& p, const Rational& optimal_threshold) {
  return p <= optimal_threshold ? Action::A : Action::B;
}

/// 1 when the action implied by (phi, t) differs from the optimal one.
int error_indicator(const Rational& p, const Rational& phi, const ThresholdEntry& t,
                    const Rational& welfare_b);
int error_indicator(const Rational& p, double phi, const ThresholdEntry& t,
                    const Rational& welfare_b);

/// Limit predictions are exact for rational-valued models and floating for the
/// logistic ones.
using Predictions = std::variant<std::vector<Rational>, std::vector<double>>;

std::size_t prediction_size(const Predictions& phi);
double prediction_at(const Predictions& phi, std::size_t i);
std::string format_predictions(const Predictions& phi);

/// Population regret of a predictor/threshold pair in one state.
struct StateRegret {
  Rational total;
  std::vector<Rational> per_covariate;
  int boundary_events = 0;
};

StateRegret evaluate_state(const Problem& problem, const State& state, const Predictions& phi,
                           const ThresholdPolicy& policy);
/// Sum over x of P(x) |(1 - U_xB) - p_sx| 1[error]. Throws ShapeError on length mismatch.
Rational state_regret(const Problem& problem, const State& state, const Predictions& phi,
                      const ThresholdPolicy& policy);

/// Sum over x of P(x) p_sx.
Rational marginal_mean(const Problem& problem, const State& state);

/// Upper bound on any state's regret: sum of P(x) max(U_xB, 1 - U_xB).
Rational regret_ceiling(const Problem& problem);

/// Maximum regret of one predictor/threshold pair over a set of states.
struct RegretReport {
  Rational mr;
  std::vector<State> argmax_states;
  /// Per-covariate contribution at the first maximizing state.
  std::vector<Rational> breakdown;
  int boundary_events = 0;
};

}  // namespace limreg

#endif  // LIMREG_PROBLEM_HPP
