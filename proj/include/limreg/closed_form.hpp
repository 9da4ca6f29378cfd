#ifndef LIMREG_CLOSED_FORM_HPP
#define LIMREG_CLOSED_FORM_HPP

#include <cstdint>
#include <vector>

#include "limreg/problem.hpp"

namespace limreg {

/// Supremum of regret over the continuous state space when phi = p:
/// sum of P(x) |(1 - U_xB) - t_x|. Forced entries are rejected.
Rational correct_spec_mr(const Problem& problem, const ThresholdPolicy& policy);

/// Binary covariate, marginal-mean predictor, threshold
/// t* = P0 (1 - U0) + P1 (1 - U1). Cells are keyed by whether each
/// covariate weight exceeds t*.
struct BinaryMarginalCase {
  enum class Cell { BothAtMost, OneAbove, ZeroAbove, BothAbove };

  Rational p0;
  Rational p1;
  Rational u0;
  Rational u1;
  Rational t_star;
  Cell cell = Cell::BothAtMost;
  Rational mr;
};

const char* to_string(BinaryMarginalCase::Cell cell);

BinaryMarginalCase table1_mr(const Rational& p0, const Rational& p1, const Rational& u0,
                             const Rational& u1);

/// Exhaustive maximum regret of the marginal-mean predictor at t* over the
/// (steps+1)^2 grid {0, 1/steps, ..., 1}^2. Approaches the supremum from the
/// grid side; the gap is at most 2/steps.
struct BinaryGridMax {
  Rational mr;
  /// First maximizing (p_s0, p_s1) in row-major order.
  Rational q0;
  Rational q1;
};

BinaryGridMax table1_brute_force(const Rational& p0, const Rational& u0, const Rational& u1,
                                 std::int64_t steps);

struct Interval {
  Rational lower;
  Rational upper;
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Bounds on MR for any two-parameter model that interpolates the first K
/// covariates when those use t_x = 1 - U_xB.
Interval interp_bounds(const Problem& problem, int k);

/// MR attained by forcing A (U_xB <= 1/2) or B (U_xB > 1/2) on covariates past the head.
Rational extreme_threshold_mr(const Problem& problem, int k);

/// Head thresholds 1 - U_xB for the first k covariates, forced actions after.
ThresholdPolicy extreme_tail_policy(const Problem& problem, int k);

/// Labels of the k most probable covariates (ties keep covariate order).
/// Requires the welfare of the remaining covariates to be x-invariant.
std::vector<Rational> best_k_subset(const Problem& problem, int k);

enum class BinaryCovariate { X0, X1 };

/// Values of p_sx consistent with marginal p_s and weights (P0, P1).
Interval identification_interval(const Rational& p_s, const Rational& p0, const Rational& p1,
                                 BinaryCovariate which);

}  // namespace limreg

#endif  // LIMREG_CLOSED_FORM_HPP
