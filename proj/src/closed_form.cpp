#include "limreg/closed_form.hpp"

#include <algorithm>
#include <numeric>

namespace limreg {

namespace {

void check_k(const Problem& problem, int k) {
  if (k < 1 || static_cast<std::size_t>(k) > problem.size()) {
    throw DomainError("K=" + std::to_string(k) + " outside [1, " + std::to_string(problem.size()) + "]");
  }
}

void check_binary(const Rational& p0, const Rational& p1) {
  if (p0 <= Rational(0) || p1 <= Rational(0) || p0 + p1 != Rational(1)) {
    throw DomainError("binary covariate weights must be positive and sum to 1");
  }
}

}  // namespace

Rational correct_spec_mr(const Problem& problem, const ThresholdPolicy& policy) {
  if (policy.size() != problem.size()) throw ShapeError("threshold policy length differs from covariate count");
  Rational total;
  for (std::size_t i = 0; i < problem.size(); ++i) {
    if (!policy[i].is_value()) throw DomainError("closed form assumes interior thresholds, got " + policy[i].str());
    total += problem.weights()[i] * abs(problem.optimal_thresholds()[i] - policy[i].t());
  }
  return total;
}

const char* to_string(BinaryMarginalCase::Cell cell) {
  switch (cell) {
    case BinaryMarginalCase::Cell::BothAtMost:
      return "P0<=t,P1<=t";
    case BinaryMarginalCase::Cell::OneAbove:
      return "P0<=t,P1>t";
    case BinaryMarginalCase::Cell::ZeroAbove:
      return "P0>t,P1<=t";
    case BinaryMarginalCase::Cell::BothAbove:
      return "P0>t,P1>t";
  }
  return "?";
}

BinaryMarginalCase table1_mr(const Rational& p0, const Rational& p1, const Rational& u0,
                             const Rational& u1) {
  check_binary(p0, p1);
  for (const auto& u : {u0, u1}) {
    if (u <= Rational(0) || u >= Rational(1)) throw DomainError("U_xB must lie strictly inside (0,1)");
  }
  BinaryMarginalCase c{p0, p1, u0, u1, p0 * (Rational(1) - u0) + p1 * (Rational(1) - u1), {}, {}};
  const bool zero_above = p0 > c.t_star;
  const bool one_above = p1 > c.t_star;
  const Rational one(1);
  if (!zero_above && !one_above) {
    c.cell = BinaryMarginalCase::Cell::BothAtMost;
    c.mr = max(p0 * u0, p1 * u1);
  } else if (!zero_above) {
    c.cell = BinaryMarginalCase::Cell::OneAbove;
    c.mr = p0 * max(u0, one - u0);
  } else if (!one_above) {
    c.cell = BinaryMarginalCase::Cell::ZeroAbove;
    c.mr = p1 * max(u1, one - u1);
  } else {
    c.cell = BinaryMarginalCase::Cell::BothAbove;
    c.mr = max(p0 * (one - u0), p1 * (one - u1));
  }
  return c;
}

BinaryGridMax table1_brute_force(const Rational& p0, const Rational& u0, const Rational& u1,
                                 std::int64_t steps) {
  if (steps < 1) throw ConfigError("brute-force grid needs at least one step");
  const Rational p1 = Rational(1) - p0;
  check_binary(p0, p1);
  const auto t = ThresholdEntry::value(p0 * (Rational(1) - u0) + p1 * (Rational(1) - u1));
  const Rational thr0 = Rational(1) - u0;
  const Rational thr1 = Rational(1) - u1;
  BinaryGridMax best;
  for (std::int64_t i = 0; i <= steps; ++i) {
    const Rational q0(i, steps);
    const Rational part0 = p0 * q0;
    const Rational gap0 = p0 * abs(thr0 - q0);
    for (std::int64_t j = 0; j <= steps; ++j) {
      const Rational q1(j, steps);
      const Rational phi = part0 + p1 * q1;
      Rational r;
      if (error_indicator(q0, phi, t, u0)) r += gap0;
      if (error_indicator(q1, phi, t, u1)) r += p1 * abs(thr1 - q1);
      if (r > best.mr) best = {r, q0, q1};
    }
  }
  return best;
}

Interval interp_bounds(const Problem& problem, int k) {
  check_k(problem, k);
  Interval out;
  for (std::size_t i = static_cast<std::size_t>(k); i < problem.size(); ++i) {
    const auto& u = problem.welfare()[i];
    out.lower += problem.weights()[i] * min(u, Rational(1) - u);
    out.upper += problem.weights()[i] * max(u, Rational(1) - u);
  }
  return out;
}

Rational extreme_threshold_mr(const Problem& problem, int k) { return interp_bounds(problem, k).lower; }

ThresholdPolicy extreme_tail_policy(const Problem& problem, int k) {
  check_k(problem, k);
  ThresholdPolicy out;
  for (std::size_t i = 0; i < problem.size(); ++i) {
    if (i < static_cast<std::size_t>(k)) {
      out.push_back(ThresholdEntry::value(problem.optimal_thresholds()[i]));
    } else {
      out.push_back(problem.welfare()[i] <= Rational(1, 2) ? ThresholdEntry::force_a()
                                                           : ThresholdEntry::force_b());
    }
  }
  return out;
}

std::vector<Rational> best_k_subset(const Problem& problem, int k) {
  check_k(problem, k);
  std::vector<std::size_t> order(problem.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return problem.weights()[a] > problem.weights()[b];
  });
  const auto head = static_cast<std::size_t>(k);
  for (std::size_t i = head + 1; i < order.size(); ++i) {
    if (problem.welfare()[order[i]] != problem.welfare()[order[head]]) {
      throw DomainError("best_k_subset requires x-invariant welfare outside the head");
    }
  }
  std::vector<Rational> out;
  for (std::size_t i = 0; i < head; ++i) out.push_back(problem.covariates()[order[i]]);
  return out;
}

Interval identification_interval(const Rational& p_s, const Rational& p0, const Rational& p1,
                                 BinaryCovariate which) {
  check_binary(p0, p1);
  if (p_s < Rational(0) || p_s > Rational(1)) throw DomainError("marginal probability outside [0,1]");
  const auto& own = which == BinaryCovariate::X0 ? p0 : p1;
  const auto& other = which == BinaryCovariate::X0 ? p1 : p0;
  return {max(Rational(0), (p_s - other) / own), min(Rational(1), p_s / own)};
}

}  // namespace limreg
