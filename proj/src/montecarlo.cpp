#include "limreg/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "limreg/parallel.hpp"

namespace limreg {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

SplitMix64::result_type SplitMix64::operator()() {
  state_ += 0x9e3779b97f4a7c15ULL;
  return mix64(state_);
}

std::uint64_t stream_key(std::uint64_t seed, std::uint64_t state_index, std::uint64_t replication) {
  std::uint64_t h = mix64(seed + 0x9e3779b97f4a7c15ULL);
  h = mix64(h ^ (state_index + 0x632be59bd9b4e019ULL));
  return mix64(h ^ (replication + 0x85157af5ULL));
}

std::vector<Observation> draw_sample(const SamplingLaw& law, std::size_t n, std::uint64_t key) {
  if (n < 1) throw DomainError("sample size must be at least 1");
  validate_state(law.problem, law.state);
  const auto k = law.problem.size();
  std::vector<double> cdf(k);
  std::vector<double> p(k);
  Rational cum;
  for (std::size_t i = 0; i < k; ++i) {
    cum += law.problem.weights()[i];
    cdf[i] = cum.to_double();
    p[i] = law.state.p[i].to_double();
  }
  SplitMix64 gen(key);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Observation> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = unit(gen);
    const auto x = std::min<std::size_t>(
        static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin()), k - 1);
    out.push_back({x, unit(gen) < p[x] ? 1 : 0});
  }
  return out;
}

const char* to_string(Estimator e) {
  switch (e) {
    case Estimator::MarginalMean:
      return "marginal-mean";
    case Estimator::LinearLS:
      return "linear";
    case Estimator::LogitLS:
      return "logit";
  }
  return "?";
}

Estimator parse_estimator(const std::string& name) {
  if (name == "marginal-mean") return Estimator::MarginalMean;
  if (name == "linear") return Estimator::LinearLS;
  if (name == "logit") return Estimator::LogitLS;
  throw std::invalid_argument("unknown estimator \"" + name + "\" (marginal-mean, linear, logit)");
}

Predictions sample_estimate(const std::vector<Observation>& sample, Estimator estimator,
                            const Problem& problem, const LogitSolverSettings& settings) {
  if (sample.empty()) throw DomainError("empty sample");
  const auto k = problem.size();
  std::vector<std::int64_t> count(k, 0);
  std::vector<std::int64_t> events(k, 0);
  for (const auto& o : sample) {
    if (o.x >= k) throw ShapeError("observation covariate index out of range");
    ++count[o.x];
    events[o.x] += o.y;
  }
  const auto total = static_cast<std::int64_t>(sample.size());
  if (estimator == Estimator::MarginalMean) {
    std::int64_t ones = 0;
    for (auto e : events) ones += e;
    return std::vector<Rational>(k, Rational(ones, total));
  }
  // Squared loss over the sample equals a weighted fit to the cell means.
  std::vector<std::size_t> seen;
  for (std::size_t i = 0; i < k; ++i) {
    if (count[i] > 0) seen.push_back(i);
  }
  if (seen.size() < 2) throw DegenerateDesign("sample contains fewer than two distinct covariate values");
  if (estimator == Estimator::LinearLS) {
    // Normal equations from raw sums keep denominators near N^2 instead of a product of cell counts.
    Rational sw, sx, sxx, sy, sxy;
    for (auto i : seen) {
      const Rational& c = problem.covariates()[i];
      const Rational n_i(count[i]);
      const Rational e_i(events[i]);
      sw += n_i;
      sx += n_i * c;
      sxx += n_i * c * c;
      sy += e_i;
      sxy += e_i * c;
    }
    const Rational det = sw * sxx - sx * sx;
    const Rational a = (sy * sxx - sx * sxy) / det;
    const Rational b = (sw * sxy - sx * sy) / det;
    std::vector<Rational> out;
    for (const auto& c : problem.covariates()) out.push_back(a + b * c);
    return out;
  }
  std::vector<double> x, w, y;
  for (auto i : seen) {
    x.push_back(problem.covariates()[i].to_double());
    w.push_back(static_cast<double>(count[i]) / static_cast<double>(total));
    y.push_back(static_cast<double>(events[i]) / static_cast<double>(count[i]));
  }
  const auto fit = fit_logistic_weighted(x, w, y, settings);
  std::vector<double> out;
  for (const auto& c : problem.covariates()) out.push_back(logistic(fit.a + fit.b * c.to_double()));
  return out;
}

Replication replicate(const Problem& problem, const State& state, Estimator estimator,
                      const ThresholdPolicy& policy, std::size_t n, std::uint64_t seed,
                      std::uint64_t state_index, std::uint64_t replication) {
  const SamplingLaw law{problem, state};
  const auto sample = draw_sample(law, n, stream_key(seed, state_index, replication));
  Replication rep;
  Predictions phi;
  try {
    phi = sample_estimate(sample, estimator, problem);
  } catch (const DegenerateDesign&) {
    rep.skipped = true;
    return rep;
  } catch (const SolverError& e) {
    // Slow linear convergence on noisy cell means; the best iterate is kept and counted.
    rep.unconverged = true;
    std::vector<double> values;
    for (const auto& c : problem.covariates()) values.push_back(logistic(e.best().a + e.best().b * c.to_double()));
    phi = std::move(values);
  }
  rep.regret = evaluate_state(problem, state, phi, policy);
  rep.errors.resize(problem.size());
  std::visit(
      [&](const auto& values) {
        for (std::size_t i = 0; i < problem.size(); ++i) {
          rep.errors[i] = error_indicator(state.p[i], values[i], policy[i], problem.welfare()[i]);
        }
      },
      phi);
  return rep;
}

namespace {

MCEstimate summarize(const std::vector<Replication>& reps, std::size_t k, std::uint64_t seed) {
  MCEstimate est;
  est.seed = seed;
  est.error_frequency.assign(k, 0.0);
  est.per_covariate.assign(k, 0.0);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (const auto& r : reps) {
    if (r.skipped) {
      ++est.skipped;
      continue;
    }
    ++est.reps;
    est.unconverged += r.unconverged;
    const double v = r.regret.total.to_double();
    sum += v;
    sum_sq += v * v;
    for (std::size_t i = 0; i < k; ++i) {
      est.error_frequency[i] += r.errors[i];
      est.per_covariate[i] += r.regret.per_covariate[i].to_double();
    }
  }
  if (est.reps == 0) return est;
  const double m = static_cast<double>(est.reps);
  est.mean = sum / m;
  if (est.reps > 1) {
    const double var = std::max(0.0, (sum_sq - m * est.mean * est.mean) / (m - 1.0));
    est.std_error = std::sqrt(var / m);
  }
  for (std::size_t i = 0; i < k; ++i) {
    est.error_frequency[i] /= m;
    est.per_covariate[i] /= m;
  }
  return est;
}

}  // namespace

MCEstimate expected_regret_mc(const Problem& problem, const State& state, Estimator estimator,
                              const ThresholdPolicy& policy, std::size_t n, int reps,
                              std::uint64_t seed, int threads, std::uint64_t state_index) {
  if (reps < 2) throw DomainError("Monte Carlo needs at least two replications");
  validate_state(problem, state);
  std::vector<Replication> out(static_cast<std::size_t>(reps));
  parallel_for(out.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      out[r] = replicate(problem, state, estimator, policy, n, seed, state_index, r);
    }
  });
  return summarize(out, problem.size(), seed);
}

FiniteSampleMR finite_sample_mr(const Problem& problem, Estimator estimator,
                                const ThresholdPolicy& policy, const StateGrid& grid, std::size_t n,
                                int reps, std::uint64_t seed, int threads,
                                std::uint64_t draw_budget) {
  if (reps < 2) throw DomainError("Monte Carlo needs at least two replications");
  const auto states = grid.count();
  const long double cost = static_cast<long double>(states) * reps * static_cast<long double>(n);
  if (cost > static_cast<long double>(draw_budget)) {
    throw BudgetError("Monte Carlo draw budget exceeded",
                      cost > 1.8e19L ? ~0ULL : static_cast<std::uint64_t>(cost), draw_budget);
  }
  std::vector<MCEstimate> per_state(states);
  parallel_for(per_state.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t s = begin; s < end; ++s) {
      const auto state = grid.at(s);
      std::vector<Replication> out(static_cast<std::size_t>(reps));
      for (std::size_t r = 0; r < out.size(); ++r) {
        out[r] = replicate(problem, state, estimator, policy, n, seed, s, r);
      }
      per_state[s] = summarize(out, problem.size(), seed);
    }
  });
  FiniteSampleMR result;
  for (std::size_t s = 0; s < per_state.size(); ++s) {
    if (s == 0 || per_state[s].mean > result.estimate.mean) {
      result.estimate = per_state[s];
      result.argmax_index = s;
    }
  }
  result.argmax = grid.at(result.argmax_index);
  return result;
}

}  // namespace limreg
