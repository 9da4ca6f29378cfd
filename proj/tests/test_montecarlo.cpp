#include "doctest.h"
#include "limreg/montecarlo.hpp"

#include <cmath>

using namespace limreg;

namespace {

Rational q(std::int64_t n, std::int64_t d = 1) { return Rational(n, d); }

Problem uniform_half() { return Problem::uniform({q(1, 2), q(1, 2), q(1, 2), q(1, 2)}); }

State constant(Rational v) { return State{std::vector<Rational>(4, v)}; }

// Oracle: P(Binomial(n, p) <= k) by direct summation in long double.
long double binomial_cdf(int n, long double p, int k) {
  long double total = 0.0L;
  for (int i = 0; i <= k; ++i) {
    const long double log_term = std::lgamma(n + 1.0L) - std::lgamma(i + 1.0L) - std::lgamma(n - i + 1.0L) +
                                 i * std::log(p) + (n - i) * std::log1p(-p);
    total += std::exp(log_term);
  }
  return total;
}

}  // namespace

TEST_CASE("stream keys are distinct and stable") {
  CHECK(stream_key(1, 0, 0) == stream_key(1, 0, 0));
  CHECK(stream_key(1, 0, 0) != stream_key(1, 0, 1));
  CHECK(stream_key(1, 0, 0) != stream_key(1, 1, 0));
  CHECK(stream_key(1, 0, 0) != stream_key(2, 0, 0));
  SplitMix64 a(99), b(99);
  for (int i = 0; i < 10; ++i) CHECK(a() == b());
}

TEST_CASE("degenerate states produce degenerate samples") {
  const SamplingLaw ones{uniform_half(), constant(q(1))};
  const SamplingLaw zeros{uniform_half(), constant(q(0))};
  for (const auto& o : draw_sample(ones, 500, 3)) CHECK(o.y == 1);
  for (const auto& o : draw_sample(zeros, 500, 3)) CHECK(o.y == 0);
  const auto s1 = draw_sample(ones, 100, 5);
  const auto s2 = draw_sample(ones, 100, 5);
  for (std::size_t i = 0; i < s1.size(); ++i) CHECK(s1[i].x == s2[i].x);
}

TEST_CASE("covariate draws follow P(x)") {
  const Problem p({0, 1}, {q(4, 5), q(1, 5)}, {q(1, 2), q(1, 2)});
  const auto sample = draw_sample(SamplingLaw{p, State{{q(1, 2), q(1, 2)}}}, 100000, 11);
  double share = 0;
  for (const auto& o : sample) share += o.x == 0;
  share /= static_cast<double>(sample.size());
  CHECK(std::abs(share - 0.8) < 5 * std::sqrt(0.8 * 0.2 / 100000));
}

TEST_CASE("sample estimators") {
  const auto p = uniform_half();
  const std::vector<Observation> all_ones{{0, 1}, {1, 1}, {3, 1}};
  CHECK(std::get<std::vector<Rational>>(sample_estimate(all_ones, Estimator::MarginalMean, p)) ==
        std::vector<Rational>(4, q(1)));
  const std::vector<Observation> two_point{{0, 0}, {1, 1}};
  CHECK(std::get<std::vector<Rational>>(sample_estimate(two_point, Estimator::LinearLS, p)) ==
        std::vector<Rational>{0, 1, 2, 3});
  const std::vector<Observation> one_x{{2, 0}, {2, 1}};
  CHECK_THROWS_AS(sample_estimate(one_x, Estimator::LinearLS, p), DegenerateDesign);
  CHECK_THROWS_AS(sample_estimate(one_x, Estimator::LogitLS, p), DegenerateDesign);
}

TEST_CASE("linear estimate converges to the limit fit") {
  const auto p = uniform_half();
  const State s{{q(1, 10), q(3, 5), q(1, 5), q(9, 10)}};
  const auto limit = fit_linear_wls(p, s);
  const std::size_t n = 100000;
  const auto est = std::get<std::vector<Rational>>(
      sample_estimate(draw_sample(SamplingLaw{p, s}, n, 77), Estimator::LinearLS, p));
  // The slope SE is at most 0.5 / sqrt(n var(x)) with var(x) = 5/4.
  const double se_b = 0.5 / std::sqrt(n * 1.25);
  const double b_hat = (est[1] - est[0]).to_double();
  CHECK(std::abs(b_hat - limit.b) < 5 * se_b);
  const double se_a = 0.5 * std::sqrt(7.0 / 10.0 / n) * 2;
  CHECK(std::abs(est[0].to_double() - limit.a) < 5 * se_a);
}

TEST_CASE("expected regret examples") {
  const auto p = uniform_half();
  const auto pol = invariant_policy(q(1, 2), 4);
  auto e = expected_regret_mc(p, constant(q(1)), Estimator::MarginalMean, pol, 50, 100, 1);
  CHECK(e.mean == 0.0);
  CHECK(e.std_error == 0.0);

  e = expected_regret_mc(p, constant(q(3, 4)), Estimator::MarginalMean, pol, 20, 2000, 1);
  const double exact = static_cast<double>(0.25L * binomial_cdf(20, 0.75L, 10));
  CHECK(std::abs(e.mean - exact) <= 3 * e.std_error);
  CHECK(e.std_error > 0);

  CHECK_NOTHROW(expected_regret_mc(p, constant(q(3, 4)), Estimator::MarginalMean, pol, 20, 2, 1));
  CHECK_THROWS_AS(expected_regret_mc(p, constant(q(3, 4)), Estimator::MarginalMean, pol, 20, 1, 1), DomainError);
}

TEST_CASE("per-covariate regret factorizes into gap times error frequency") {
  const auto p = Problem::uniform({q(1, 5), q(2, 5), q(3, 5), q(4, 5)});
  const State s{{q(1, 4), q(1, 2), q(3, 4), q(1)}};
  const auto pol = invariant_policy(q(1, 2), 4);
  for (auto est : {Estimator::MarginalMean, Estimator::LinearLS, Estimator::LogitLS}) {
    for (std::uint64_t r = 0; r < 50; ++r) {
      const auto rep = replicate(p, s, est, pol, 30, 5, 0, r);
      if (rep.skipped) continue;
      for (std::size_t x = 0; x < 4; ++x) {
        const Rational gap = abs(q(1) - p.welfare()[x] - s.p[x]);
        CHECK(rep.regret.per_covariate[x] == p.weights()[x] * gap * q(rep.errors[x]));
      }
    }
    const auto e = expected_regret_mc(p, s, est, pol, 30, 200, 5);
    double total = 0;
    for (std::size_t x = 0; x < 4; ++x) {
      const double gap = std::abs((q(1) - p.welfare()[x] - s.p[x]).to_double());
      CHECK(e.per_covariate[x] == doctest::Approx(0.25 * gap * e.error_frequency[x]).epsilon(1e-12));
      total += e.per_covariate[x];
    }
    CHECK(total == doctest::Approx(e.mean).epsilon(1e-12));
  }
}

TEST_CASE("small samples skip degenerate replications") {
  const auto p = uniform_half();
  const auto e = expected_regret_mc(p, constant(q(1, 2)), Estimator::LinearLS, invariant_policy(q(1, 2), 4), 2, 400, 3);
  CHECK(e.skipped > 0);
  CHECK(e.reps + e.skipped == 400);
}

TEST_CASE("results are identical across thread counts") {
  const auto p = uniform_half();
  const auto pol = invariant_policy(q(1, 2), 4);
  const auto grid = StateGrid::repeated({q(0), q(1, 2), q(1)}, 4);
  const auto one = finite_sample_mr(p, Estimator::LinearLS, pol, grid, 40, 20, 9, 1);
  for (int threads : {2, 5, 8}) {
    const auto many = finite_sample_mr(p, Estimator::LinearLS, pol, grid, 40, 20, 9, threads);
    CHECK(many.estimate.mean == one.estimate.mean);
    CHECK(many.estimate.std_error == one.estimate.std_error);
    CHECK(many.argmax_index == one.argmax_index);
  }
  const auto a = expected_regret_mc(p, constant(q(3, 4)), Estimator::LogitLS, pol, 30, 64, 4, 1);
  const auto b = expected_regret_mc(p, constant(q(3, 4)), Estimator::LogitLS, pol, 30, 64, 4, 7);
  CHECK(a.mean == b.mean);
  CHECK(a.error_frequency == b.error_frequency);
}

TEST_CASE("finite-sample MR") {
  const auto p = uniform_half();
  const auto pol = invariant_policy(q(1, 2), 4);
  const StateGrid zero_regret({{q(1)}, {q(1)}, {q(1)}, {q(1)}});
  CHECK(finite_sample_mr(p, Estimator::MarginalMean, pol, zero_regret, 100, 10, 1).estimate.mean == 0.0);
  CHECK_THROWS_AS(finite_sample_mr(p, Estimator::MarginalMean, pol, StateGrid::uniform(q(1, 4), 4), 10000, 2000, 1,
                                   1, 1000000),
                  BudgetError);
}

TEST_CASE("larger samples do not increase regret off the threshold") {
  const auto p = uniform_half();
  const auto pol = invariant_policy(q(1, 2), 4);
  const State s{{q(1, 10), q(1, 5), q(1, 5), q(1, 10)}};
  const auto small = expected_regret_mc(p, s, Estimator::LinearLS, pol, 100, 400, 2);
  const auto big = expected_regret_mc(p, s, Estimator::LinearLS, pol, 10000, 400, 2);
  const double pooled = std::hypot(small.std_error, big.std_error);
  CHECK(big.mean <= small.mean + 3 * pooled);
  CHECK(big.mean <= 0.01);
}
