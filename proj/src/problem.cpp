#include "limreg/problem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <type_traits>

namespace limreg {

Problem::Problem(std::vector<Rational> covariates, std::vector<Rational> weights,
                 std::vector<Rational> welfare)
    : covariates_(std::move(covariates)), weights_(std::move(weights)), welfare_(std::move(welfare)) {
  const auto n = covariates_.size();
  if (n == 0) throw DomainError("problem needs at least one covariate");
  if (weights_.size() != n || welfare_.size() != n) {
    throw ShapeError("covariates, weights and welfare must have equal length");
  }
  Rational total;
  for (std::size_t i = 0; i < n; ++i) {
    if (weights_[i] <= Rational(0)) {
      throw DomainError("P(x) must be positive; got " + weights_[i].str() + " at x=" +
                        covariates_[i].str());
    }
    if (welfare_[i] <= Rational(0) || welfare_[i] >= Rational(1)) {
      throw DomainError("U_xB must lie strictly inside (0,1); got " + welfare_[i].str() +
                        " at x=" + covariates_[i].str());
    }
    total += weights_[i];
    for (std::size_t j = 0; j < i; ++j) {
      if (covariates_[j] == covariates_[i]) {
        throw DomainError("duplicate covariate label " + covariates_[i].str());
      }
    }
  }
  if (total != Rational(1)) throw DomainError("covariate weights sum to " + total.str() + ", not 1");
  optimal_.reserve(n);
  for (const auto& u : welfare_) optimal_.push_back(Rational(1) - u);
}

Problem Problem::uniform(std::vector<Rational> welfare) {
  const auto n = static_cast<std::int64_t>(welfare.size());
  if (n == 0) throw DomainError("problem needs at least one covariate");
  std::vector<Rational> labels;
  std::vector<Rational> weights;
  for (std::int64_t i = 0; i < n; ++i) {
    labels.emplace_back(i);
    weights.emplace_back(1, n);
  }
  return Problem(std::move(labels), std::move(weights), std::move(welfare));
}

std::size_t Problem::index_of(const Rational& x) const {
  const auto it = std::find(covariates_.begin(), covariates_.end(), x);
  if (it == covariates_.end()) throw LookupError("unknown covariate " + x.str());
  return static_cast<std::size_t>(it - covariates_.begin());
}

double optimal_threshold_general(const GeneralWelfare& w) {
  if (!(w.b1 > w.a1)) throw DomainError("requires U(B,1) > U(A,1)");
  if (!(w.a0 > w.b0)) throw DomainError("requires U(A,0) > U(B,0)");
  const double gain_a = w.a0 - w.b0;
  return gain_a / (gain_a + (w.b1 - w.a1));
}

Rational optimal_threshold(const Problem& problem, const Rational& x) {
  return problem.optimal_thresholds()[problem.index_of(x)];
}

void validate_state(const Problem& problem, const State& state) {
  if (state.p.size() != problem.size()) {
    throw ShapeError("state has " + std::to_string(state.p.size()) + " entries, problem has " +
                     std::to_string(problem.size()) + " covariates");
  }
  for (const auto& v : state.p) {
    if (v < Rational(0) || v > Rational(1)) {
      throw DomainError("state probability " + v.str() + " outside [0,1]");
    }
  }
}

std::string format_state(const State& state) {
  std::string out;
  for (std::size_t i = 0; i < state.p.size(); ++i) {
    if (i) out.push_back(';');
    out += state.p[i].str();
  }
  return out;
}

ThresholdEntry ThresholdEntry::value(Rational t) {
  if (t < Rational(0) || t > Rational(1)) throw DomainError("threshold " + t.str() + " outside [0,1]");
  return ThresholdEntry(Kind::Value, t);
}

std::string ThresholdEntry::str() const {
  switch (kind_) {
    case Kind::ForceA:
      return "forceA";
    case Kind::ForceB:
      return "forceB";
    default:
      return t_.str();
  }
}

ThresholdPolicy invariant_policy(const Rational& t, std::size_t n) {
  return ThresholdPolicy(n, ThresholdEntry::value(t));
}

ThresholdPolicy optimal_policy(const Problem& problem) {
  ThresholdPolicy out;
  for (const auto& t : problem.optimal_thresholds()) out.push_back(ThresholdEntry::value(t));
  return out;
}

std::string format_policy(const ThresholdPolicy& policy) {
  if (!policy.empty() && std::all_of(policy.begin(), policy.end(),
                                     [&](const auto& e) { return e == policy.front(); })) {
    return policy.front().str();
  }
  std::string out;
  for (std::size_t i = 0; i < policy.size(); ++i) {
    if (i) out.push_back(';');
    out += policy[i].str();
  }
  return out;
}

Action decide(const Rational& phi, const ThresholdEntry& t) {
  switch (t.kind()) {
    case ThresholdEntry::Kind::ForceA:
      return Action::A;
    case ThresholdEntry::Kind::ForceB:
      return Action::B;
    default:
      return phi <= t.t() ? Action::A : Action::B;
  }
}

Action decide(double phi, const ThresholdEntry& t, bool* boundary) {
  switch (t.kind()) {
    case ThresholdEntry::Kind::ForceA:
      return Action::A;
    case ThresholdEntry::Kind::ForceB:
      return Action::B;
    default:
      break;
  }
  const double gap = phi - t.t().to_double();
  if (boundary != nullptr) *boundary = std::abs(gap) <= kTieTolerance;
  return gap <= kTieTolerance ? Action::A : Action::B;
}

int error_indicator(const Rational& p, const Rational& phi, const ThresholdEntry& t,
                    const Rational& welfare_b) {
  return decide(phi, t) != optimal_action(p, Rational(1) - welfare_b) ? 1 : 0;
}

int error_indicator(const Rational& p, double phi, const ThresholdEntry& t,
                    const Rational& welfare_b) {
  return decide(phi, t) != optimal_action(p, Rational(1) - welfare_b) ? 1 : 0;
}

std::size_t prediction_size(const Predictions& phi) {
  return std::visit([](const auto& v) { return v.size(); }, phi);
}

double prediction_at(const Predictions& phi, std::size_t i) {
  if (const auto* exact = std::get_if<std::vector<Rational>>(&phi)) return (*exact)[i].to_double();
  return std::get<std::vector<double>>(phi)[i];
}

std::string format_predictions(const Predictions& phi) {
  std::ostringstream os;
  os.precision(12);
  const auto n = prediction_size(phi);
  for (std::size_t i = 0; i < n; ++i) {
    if (i) os << ';';
    if (const auto* exact = std::get_if<std::vector<Rational>>(&phi)) {
      os << (*exact)[i].str();
    } else {
      os << std::get<std::vector<double>>(phi)[i];
    }
  }
  return os.str();
}

namespace {

void check_shapes(const Problem& problem, const State& state, const Predictions& phi,
                  const ThresholdPolicy& policy) {
  const auto n = problem.size();
  if (state.p.size() != n || prediction_size(phi) != n || policy.size() != n) {
    throw ShapeError("state, predictions and thresholds must each have " + std::to_string(n) +
                     " entries");
  }
}

template <typename F>
void for_each_error(const Problem& problem, const State& state, const Predictions& phi,
                    const ThresholdPolicy& policy, F&& on_error, int* boundary_events) {
  const auto& opt = problem.optimal_thresholds();
  std::visit(
      [&](const auto& values) {
        for (std::size_t i = 0; i < values.size(); ++i) {
          Action chosen;
          if constexpr (std::is_same_v<std::decay_t<decltype(values)>, std::vector<double>>) {
            bool boundary = false;
            chosen = decide(values[i], policy[i], &boundary);
            if (boundary && boundary_events != nullptr) ++*boundary_events;
          } else {
            chosen = decide(values[i], policy[i]);
          }
          if (chosen != optimal_action(state.p[i], opt[i])) on_error(i);
        }
      },
      phi);
}

}  // namespace

StateRegret evaluate_state(const Problem& problem, const State& state, const Predictions& phi,
                           const ThresholdPolicy& policy) {
  check_shapes(problem, state, phi, policy);
  StateRegret out;
  out.per_covariate.assign(problem.size(), Rational{});
  for_each_error(
      problem, state, phi, policy,
      [&](std::size_t i) {
        out.per_covariate[i] =
            problem.weights()[i] * abs(problem.optimal_thresholds()[i] - state.p[i]);
        out.total += out.per_covariate[i];
      },
      &out.boundary_events);
  return out;
}

Rational state_regret(const Problem& problem, const State& state, const Predictions& phi,
                      const ThresholdPolicy& policy) {
  check_shapes(problem, state, phi, policy);
  Rational total;
  for_each_error(
      problem, state, phi, policy,
      [&](std::size_t i) {
        total += problem.weights()[i] * abs(problem.optimal_thresholds()[i] - state.p[i]);
      },
      nullptr);
  return total;
}

Rational marginal_mean(const Problem& problem, const State& state) {
  validate_state(problem, state);
  Rational m;
  for (std::size_t i = 0; i < problem.size(); ++i) m += problem.weights()[i] * state.p[i];
  return m;
}

Rational regret_ceiling(const Problem& problem) {
  Rational c;
  for (std::size_t i = 0; i < problem.size(); ++i) {
    const auto& u = problem.welfare()[i];
    c += problem.weights()[i] * max(u, Rational(1) - u);
  }
  return c;
}

}  // namespace limreg
