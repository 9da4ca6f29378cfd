#ifndef LIMREG_PREDICTORS_HPP
#define LIMREG_PREDICTORS_HPP

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "limreg/problem.hpp"

namespace limreg {

/// Which limit predictor maps a state to predictions.
struct PredictorSpec {
  enum class Kind { Correct, Shifted, MarginalMean, LinearWLS, LogitNLS, Interpolating };
  enum class Model { Linear, Logit };

  Kind kind = Kind::Correct;
  /// Target invariant threshold for Shifted.
  Rational shift_target;
  /// Model and head size for Interpolating.
  Model model = Model::Linear;
  int k = 2;

  static PredictorSpec correct() { return {}; }
  static PredictorSpec shifted(Rational t);
  static PredictorSpec marginal_mean() { return {Kind::MarginalMean, {}, Model::Linear, 2}; }
  static PredictorSpec linear_wls() { return {Kind::LinearWLS, {}, Model::Linear, 2}; }
  static PredictorSpec logit_nls() { return {Kind::LogitNLS, {}, Model::Logit, 2}; }
  static PredictorSpec interpolating(Model model, int k);

  /// Stable identifier such as "marginal-mean", "shifted(1/2)", "interp-logit(2)".
  [[nodiscard]] std::string name() const;
  /// Inverse of name().
  static PredictorSpec parse(const std::string& name);

  /// Rational-valued predictions (everything except the logistic models).
  [[nodiscard]] bool exact() const;

  friend bool operator==(const PredictorSpec&, const PredictorSpec&) = default;
};

/// Fitted (intercept, slope) of a two-parameter index model a + b x.
struct FittedParams {
  double a = 0.0;
  double b = 0.0;
  /// Weighted mean squared error at (a, b).
  double mse = 0.0;
  bool converged = true;
  bool at_bound = false;
  /// Set for the linear fits, which are solved in exact arithmetic.
  std::optional<Rational> exact_a;
  std::optional<Rational> exact_b;
  std::optional<Rational> exact_mse;
  /// Multistart index that produced the reported minimum (logit only).
  int start = -1;
  int iterations = 0;
};

/// All logistic starts ran out of iterations.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, FittedParams best)
      : std::runtime_error(what), best_(best) {}
  [[nodiscard]] const FittedParams& best() const { return best_; }

 private:
  FittedParams best_;
};

/// Damped Gauss-Newton settings for the logistic least-squares fit.
struct LogitSolverSettings {
  std::vector<double> start_values{-4.0, -2.0, -0.5, 0.0, 0.5, 2.0, 4.0};
  double box = 50.0;
  double initial_damping = 1e-3;
  double step_tol = 1e-12;
  double grad_tol = 1e-12;
  int max_iterations = 200;
};

double logistic(double z);

/// Minimizes sum_i w_i (target_i - a - b x_i)^2 in closed form.
/// Throws DegenerateDesign when the weighted x variance is zero.
FittedParams fit_linear_weighted(std::span<const Rational> x, std::span<const Rational> w,
                                 std::span<const Rational> target);

/// Minimizes sum_i w_i (target_i - logistic(a + b x_i))^2 over the box
/// |a|, |b| <= settings.box by Levenberg-Marquardt from every start pair.
FittedParams fit_logistic_weighted(std::span<const double> x, std::span<const double> w,
                                   std::span<const double> target,
                                   const LogitSolverSettings& settings = {});

/// Local solution reached from each multistart pair, in start order.
std::vector<FittedParams> fit_logistic_all_starts(std::span<const double> x, std::span<const double> w,
                                                  std::span<const double> target,
                                                  const LogitSolverSettings& settings = {});

/// Weighted objective and its analytic gradient with respect to (a, b).
double logistic_objective(std::span<const double> x, std::span<const double> w,
                          std::span<const double> target, double a, double b,
                          std::array<double, 2>* gradient = nullptr);

/// Least-squares limit fit of a + b x to the state under P(x).
FittedParams fit_linear_wls(const Problem& problem, const State& state);
/// Least-squares limit fit of logistic(a + b x) to the state under P(x).
FittedParams fit_logit_nls(const Problem& problem, const State& state,
                           const LogitSolverSettings& settings = {});

/// Logit targets are clamped to [eps, 1 - eps] before inversion.
inline constexpr double kLogitClamp = 1e-6;

/// Solves F(x_k, b) = p_sx for the first k covariates. Both shipped models
/// have two parameters, so k != 2 throws DomainError (arity).
FittedParams fit_interpolating(const Problem& problem, const State& state,
                               PredictorSpec::Model model, int k);

/// Limit predictions phi_s for every covariate.
Predictions predict(const PredictorSpec& spec, const Problem& problem, const State& state,
                    const LogitSolverSettings& settings = {});

/// Throws DomainError if `spec` cannot be applied to `problem`.
void validate_spec(const PredictorSpec& spec, const Problem& problem);

}  // namespace limreg

#endif  // LIMREG_PREDICTORS_HPP
