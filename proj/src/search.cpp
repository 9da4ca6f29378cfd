#include "limreg/search.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "limreg/parallel.hpp"

namespace limreg {

StateGrid::StateGrid(std::vector<std::vector<Rational>> values) : values_(std::move(values)) {
  if (values_.empty()) throw ConfigError("state grid has no covariates");
  for (auto& list : values_) {
    if (list.empty()) throw ConfigError("state grid has an empty value list");
    for (const auto& v : list) {
      if (v < Rational(0) || v > Rational(1)) throw ConfigError("grid value " + v.str() + " outside [0,1]");
    }
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
}

StateGrid StateGrid::uniform(const Rational& step, std::size_t n) {
  if (step <= Rational(0) || step > Rational(1)) throw ConfigError("grid step must lie in (0,1]");
  std::vector<Rational> list;
  for (Rational v; v < Rational(1); v += step) list.push_back(v);
  list.emplace_back(1);
  return repeated(std::move(list), n);
}

StateGrid StateGrid::repeated(std::vector<Rational> values, std::size_t n) {
  return StateGrid(std::vector<std::vector<Rational>>(n, values));
}

std::uint64_t StateGrid::count() const {
  std::uint64_t c = 1;
  for (const auto& list : values_) {
    if (c > std::numeric_limits<std::uint64_t>::max() / list.size()) {
      throw BudgetError("state grid too large", std::numeric_limits<std::uint64_t>::max(),
                        std::numeric_limits<std::uint64_t>::max());
    }
    c *= list.size();
  }
  return c;
}

State StateGrid::at(std::uint64_t index) const {
  State s;
  s.p.resize(values_.size());
  for (std::size_t d = values_.size(); d-- > 0;) {
    const auto m = values_[d].size();
    s.p[d] = values_[d][index % m];
    index /= m;
  }
  return s;
}

std::vector<State> enumerate_states(const StateGrid& grid) {
  const auto n = grid.count();
  std::vector<State> out;
  out.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) out.push_back(grid.at(i));
  return out;
}

PredictionTable tabulate_predictions(const Problem& problem, const PredictorSpec& spec,
                                     const StateGrid& grid, int threads,
                                     const LogitSolverSettings& settings) {
  validate_spec(spec, problem);
  if (grid.dimension() != problem.size()) throw ShapeError("grid dimension differs from covariate count");
  PredictionTable table;
  table.states = enumerate_states(grid);
  table.predictions.resize(table.states.size());
  parallel_for(table.states.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      try {
        table.predictions[i] = predict(spec, problem, table.states[i], settings);
      } catch (const SolverError& e) {
        throw SolverError(std::string(e.what()) + " at state " + format_state(table.states[i]),
                          e.best());
      }
    }
  });
  return table;
}

RegretReport max_regret(const Problem& problem, const PredictionTable& table,
                        const ThresholdPolicy& policy, int threads) {
  const auto n = table.states.size();
  if (n == 0) throw ConfigError("no states to search");
  std::vector<Rational> regret(n);
  std::vector<int> boundary(n, 0);
  parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      if (std::holds_alternative<std::vector<double>>(table.predictions[i])) {
        const auto ev = evaluate_state(problem, table.states[i], table.predictions[i], policy);
        regret[i] = ev.total;
        boundary[i] = ev.boundary_events;
      } else {
        regret[i] = state_regret(problem, table.states[i], table.predictions[i], policy);
      }
    }
  });
  RegretReport report;
  report.mr = *std::max_element(regret.begin(), regret.end());
  for (std::size_t i = 0; i < n; ++i) {
    report.boundary_events += boundary[i];
    if (regret[i] == report.mr) report.argmax_states.push_back(table.states[i]);
  }
  const auto first = std::find(regret.begin(), regret.end(), report.mr) - regret.begin();
  report.breakdown =
      evaluate_state(problem, table.states[first], table.predictions[first], policy).per_covariate;
  return report;
}

RegretReport max_regret(const Problem& problem, const PredictorSpec& spec,
                        const ThresholdPolicy& policy, const StateGrid& grid, int threads) {
  return max_regret(problem, tabulate_predictions(problem, spec, grid, threads), policy, threads);
}

std::vector<ThresholdPolicy> enumerate_policies(const ThresholdGrid& grid, ThresholdMode mode,
                                                std::size_t n, std::uint64_t cap) {
  const auto entries = [&](const std::vector<Rational>& values) {
    std::vector<ThresholdEntry> out;
    for (const auto& v : values) out.push_back(ThresholdEntry::value(v));
    if (grid.include_force) {
      out.push_back(ThresholdEntry::force_a());
      out.push_back(ThresholdEntry::force_b());
    }
    return out;
  };
  std::vector<ThresholdPolicy> policies;
  if (mode == ThresholdMode::Invariant) {
    for (const auto& e : entries(grid.invariant)) policies.emplace_back(n, e);
    if (policies.empty()) throw ConfigError("threshold grid is empty");
    return policies;
  }
  std::vector<std::vector<ThresholdEntry>> lists;
  if (!grid.per_covariate.empty()) {
    if (grid.per_covariate.size() != n) throw ShapeError("per-covariate threshold lists must match covariate count");
    for (const auto& l : grid.per_covariate) lists.push_back(entries(l));
  } else {
    lists.assign(n, entries(grid.invariant));
  }
  std::uint64_t count = 1;
  for (const auto& l : lists) {
    if (l.empty()) throw ConfigError("threshold grid is empty");
    if (count > cap / l.size()) {
      // Overflow-safe product for the refusal message.
      long double total = 1;
      for (const auto& m : lists) total *= static_cast<long double>(m.size());
      throw BudgetError("per-covariate threshold policies exceed the cap",
                        total > 1.8e19L ? std::numeric_limits<std::uint64_t>::max()
                                        : static_cast<std::uint64_t>(total),
                        cap);
    }
    count *= l.size();
  }
  policies.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    ThresholdPolicy p(n, ThresholdEntry::force_a());
    auto idx = i;
    for (std::size_t d = n; d-- > 0;) {
      p[d] = lists[d][idx % lists[d].size()];
      idx /= lists[d].size();
    }
    policies.push_back(std::move(p));
  }
  return policies;
}

SearchResult minimize_over_thresholds(const Problem& problem, const PredictorSpec& spec,
                                      const StateGrid& grid, const ThresholdGrid& thresholds,
                                      ThresholdMode mode, const SearchOptions& options) {
  const auto policies = enumerate_policies(thresholds, mode, problem.size(), options.policy_cap);
  const auto table = tabulate_predictions(problem, spec, grid, options.threads, options.solver);
  SearchResult result;
  for (const auto& policy : policies) {
    auto report = max_regret(problem, table, policy, options.threads);
    if (result.per_threshold_mr.empty() || report.mr < result.mmr) {
      result.mmr = report.mr;
      result.best_thresholds = policy;
    }
    result.per_threshold_mr.push_back({policy, std::move(report)});
  }
  return result;
}

Rational no_data_mmr(const Problem& problem) {
  Rational total;
  for (std::size_t i = 0; i < problem.size(); ++i) {
    const auto& u = problem.welfare()[i];
    total += problem.weights()[i] * min(u, Rational(1) - u);
  }
  return total;
}

Action no_data_decision(const Rational& welfare_b, const Rational& p_min, const Rational& p_max) {
  if (p_min < Rational(0) || p_max > Rational(1) || p_max < p_min) {
    throw DomainError("no-data bounds must satisfy 0 <= p_min <= p_max <= 1");
  }
  return (p_min + p_max) / Rational(2) > Rational(1) - welfare_b ? Action::B : Action::A;
}

MedianThreshold weighted_median_threshold(const Problem& problem) {
  std::vector<std::pair<Rational, Rational>> pts;
  for (std::size_t i = 0; i < problem.size(); ++i) {
    pts.emplace_back(problem.optimal_thresholds()[i], problem.weights()[i]);
  }
  std::sort(pts.begin(), pts.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
  const Rational half(1, 2);
  Rational cum;
  Rational t = pts.back().first;
  for (std::size_t j = 0; j < pts.size(); ++j) {
    cum += pts[j].second;
    if (cum > half) {
      t = pts[j].first;
      break;
    }
    if (cum == half) {
      t = (pts[j].first + pts[j + 1].first) / Rational(2);
      break;
    }
  }
  Rational obj;
  for (const auto& [c, w] : pts) obj += w * abs(c - t);
  return {t, obj};
}

}  // namespace limreg
