#include "doctest.h"
#include "limreg/predictors.hpp"

#include <cmath>
#include <random>

using namespace limreg;

namespace {

Rational q(std::int64_t n, std::int64_t d = 1) { return Rational(n, d); }

Problem uniform4(Rational u = Rational(1, 2)) { return Problem::uniform({u, u, u, u}); }

State st(std::initializer_list<Rational> v) { return State{std::vector<Rational>(v)}; }

std::vector<Rational> exact(const Predictions& p) { return std::get<std::vector<Rational>>(p); }
std::vector<double> numeric(const Predictions& p) { return std::get<std::vector<double>>(p); }

// Oracle: solve the 2x2 weighted normal equations by Cramer's rule.
std::pair<Rational, Rational> normal_equations(const Problem& p, const State& s) {
  Rational sw, sx, sxx, sy, sxy;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& w = p.weights()[i];
    const auto& x = p.covariates()[i];
    sw += w;
    sx += w * x;
    sxx += w * x * x;
    sy += w * s.p[i];
    sxy += w * x * s.p[i];
  }
  const Rational det = sw * sxx - sx * sx;
  return {(sy * sxx - sx * sxy) / det, (sw * sxy - sx * sy) / det};
}

}  // namespace

TEST_CASE("spec names round trip") {
  for (const auto& s : {PredictorSpec::correct(), PredictorSpec::shifted(q(3, 8)),
                        PredictorSpec::marginal_mean(), PredictorSpec::linear_wls(),
                        PredictorSpec::logit_nls(),
                        PredictorSpec::interpolating(PredictorSpec::Model::Linear, 2),
                        PredictorSpec::interpolating(PredictorSpec::Model::Logit, 2)}) {
    CHECK(PredictorSpec::parse(s.name()) == s);
  }
  CHECK_THROWS(PredictorSpec::parse("probit"));
}

TEST_CASE("simple predictors") {
  const Problem two({0, 1}, {q(1, 2), q(1, 2)}, {q(7, 10), q(3, 10)});
  CHECK(exact(predict(PredictorSpec::correct(), two, st({q(1, 10), q(9, 10)}))) ==
        std::vector<Rational>{q(1, 10), q(9, 10)});
  CHECK(exact(predict(PredictorSpec::shifted(q(1, 2)), two, st({q(1, 10), q(9, 10)}))) ==
        std::vector<Rational>{q(3, 10), q(7, 10)});
  CHECK(exact(predict(PredictorSpec::marginal_mean(), uniform4(), st({0, 0, 1, 1}))) ==
        std::vector<Rational>(4, q(1, 2)));
  // Shifted predictions are not clamped.
  CHECK(exact(predict(PredictorSpec::shifted(q(1)), two, st({q(9, 10), q(0)})))[0] == q(8, 5));
}

TEST_CASE("linear WLS examples") {
  const auto p = uniform4();
  auto f = fit_linear_wls(p, st({q(1, 3), q(1, 3), q(1, 3), q(1, 3)}));
  CHECK(*f.exact_a == q(1, 3));
  CHECK(*f.exact_b == q(0));
  f = fit_linear_wls(p, st({0, 0, 1, 1}));
  CHECK(*f.exact_a == q(-1, 10));
  CHECK(*f.exact_b == q(2, 5));
  CHECK(exact(predict(PredictorSpec::linear_wls(), p, st({0, 0, 1, 1}))) ==
        std::vector<Rational>{q(-1, 10), q(3, 10), q(7, 10), q(11, 10)});
  f = fit_linear_wls(p, st({0, 1, 0, 1}));
  CHECK(*f.exact_a == q(1, 5));
  CHECK(*f.exact_b == q(1, 5));
  CHECK(exact(predict(PredictorSpec::linear_wls(), p, st({0, 1, 0, 1}))) ==
        std::vector<Rational>{q(1, 5), q(2, 5), q(3, 5), q(4, 5)});
  CHECK_THROWS_AS(fit_linear_weighted(std::vector<Rational>{1, 1}, std::vector<Rational>{q(1, 2), q(1, 2)},
                                      std::vector<Rational>{0, 1}),
                  DegenerateDesign);
}

TEST_CASE("linear WLS orthogonality and optimality") {
  std::mt19937_64 gen(17);
  std::uniform_int_distribution<std::int64_t> g(0, 20), w(1, 9);
  for (int i = 0; i < 200; ++i) {
    std::vector<Rational> weights{q(w(gen)), q(w(gen)), q(w(gen)), q(w(gen))};
    Rational total;
    for (const auto& v : weights) total += v;
    for (auto& v : weights) v /= total;
    const Problem p({0, 1, 2, 3}, weights, std::vector<Rational>(4, q(1, 2)));
    const State s = st({q(g(gen), 20), q(g(gen), 20), q(g(gen), 20), q(g(gen), 20)});
    const auto f = fit_linear_wls(p, s);
    const auto [a, b] = normal_equations(p, s);
    CHECK(*f.exact_a == a);
    CHECK(*f.exact_b == b);
    Rational m0, m1, mse;
    for (int x = 0; x < 4; ++x) {
      const Rational r = s.p[x] - (a + b * q(x));
      m0 += weights[x] * r;
      m1 += weights[x] * r * q(x);
      mse += weights[x] * r * r;
    }
    CHECK(m0 == q(0));
    CHECK(m1 == q(0));
    CHECK(*f.exact_mse == mse);
    for (int probe = 0; probe < 5; ++probe) {
      const Rational pa = a + q(g(gen) - 10, 40), pb = b + q(g(gen) - 10, 40);
      Rational other;
      for (int x = 0; x < 4; ++x) {
        const Rational r = s.p[x] - (pa + pb * q(x));
        other += weights[x] * r * r;
      }
      CHECK(mse <= other);
    }
  }
}

TEST_CASE("logit NLS examples") {
  const auto p = uniform4();
  auto f = fit_logit_nls(p, st({q(1, 2), q(1, 2), q(1, 2), q(1, 2)}));
  CHECK(std::abs(f.a) < 1e-8);
  CHECK(std::abs(f.b) < 1e-8);
  CHECK(f.mse < 1e-16);

  f = fit_logit_nls(p, st({0, 0, 1, 1}));
  CHECK(f.mse < 1e-6);
  CHECK(f.at_bound);
  const auto phi = numeric(predict(PredictorSpec::logit_nls(), p, st({0, 0, 1, 1})));
  const std::vector<double> want{0, 0, 1, 1};
  for (int x = 0; x < 4; ++x) CHECK(std::abs(phi[x] - want[x]) < 1e-3);

  const auto sym = numeric(predict(PredictorSpec::logit_nls(), p, st({q(1, 4), q(1, 4), q(3, 4), q(3, 4)})));
  CHECK(std::abs(sym[0] - (1 - sym[3])) < 1e-8);
  CHECK(std::abs(sym[1] - (1 - sym[2])) < 1e-8);
}

TEST_CASE("logit degenerate constant states stay decision equivalent") {
  const auto p = uniform4();
  const auto zeros = numeric(predict(PredictorSpec::logit_nls(), p, st({0, 0, 0, 0})));
  const auto ones = numeric(predict(PredictorSpec::logit_nls(), p, st({1, 1, 1, 1})));
  for (int x = 0; x < 4; ++x) {
    CHECK(zeros[x] < 1e-6);
    CHECK(ones[x] > 1 - 1e-6);
  }
}

TEST_CASE("logit gradient matches central differences") {
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> u(0.0, 1.0), ab(-3.0, 3.0);
  const std::vector<double> x{0, 1, 2, 3};
  for (int i = 0; i < 100; ++i) {
    std::vector<double> w{u(gen) + 0.1, u(gen) + 0.1, u(gen) + 0.1, u(gen) + 0.1};
    const double total = w[0] + w[1] + w[2] + w[3];
    for (auto& v : w) v /= total;
    const std::vector<double> y{u(gen), u(gen), u(gen), u(gen)};
    const double a = ab(gen), b = ab(gen), h = 1e-6;
    std::array<double, 2> grad{};
    logistic_objective(x, w, y, a, b, &grad);
    const double ga = (logistic_objective(x, w, y, a + h, b) - logistic_objective(x, w, y, a - h, b)) / (2 * h);
    const double gb = (logistic_objective(x, w, y, a, b + h) - logistic_objective(x, w, y, a, b - h)) / (2 * h);
    CHECK(std::abs(grad[0] - ga) <= 1e-5 * std::max(1e-3, std::abs(ga)));
    CHECK(std::abs(grad[1] - gb) <= 1e-5 * std::max(1e-3, std::abs(gb)));
  }
}

TEST_CASE("logit returned mse is no worse than any start point") {
  std::mt19937_64 gen(29);
  std::uniform_int_distribution<std::int64_t> g(0, 4);
  const LogitSolverSettings settings;
  const std::vector<double> x{0, 1, 2, 3}, w(4, 0.25);
  for (int i = 0; i < 40; ++i) {
    std::vector<double> y;
    for (int k = 0; k < 4; ++k) y.push_back(static_cast<double>(g(gen)) / 4.0);
    const auto f = fit_logistic_weighted(x, w, y, settings);
    for (double a0 : settings.start_values)
      for (double b0 : settings.start_values) CHECK(f.mse <= logistic_objective(x, w, y, a0, b0) + 1e-15);
    for (const auto& start : fit_logistic_all_starts(x, w, y, settings)) CHECK(f.mse <= start.mse);
  }
}

TEST_CASE("interpolating predictors") {
  const auto p = uniform4();
  const auto lin = PredictorSpec::interpolating(PredictorSpec::Model::Linear, 2);
  const auto logit = PredictorSpec::interpolating(PredictorSpec::Model::Logit, 2);
  auto f = fit_interpolating(p, st({0, 1, q(1, 3), q(2, 3)}), PredictorSpec::Model::Linear, 2);
  CHECK(f.a == doctest::Approx(0.0));
  CHECK(f.b == doctest::Approx(1.0));
  CHECK(exact(predict(lin, p, st({0, 1, 0, 0}))) == std::vector<Rational>{0, 1, 2, 3});
  CHECK(exact(predict(lin, p, st({q(1, 4), q(1, 2), 1, 0}))) ==
        std::vector<Rational>{q(1, 4), q(1, 2), q(3, 4), q(1)});
  const auto half = numeric(predict(logit, p, st({q(1, 2), q(1, 2), 0, 1})));
  for (double v : half) CHECK(v == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(fit_interpolating(p, st({0, 0, 0, 0}), PredictorSpec::Model::Linear, 3), DomainError);

  std::mt19937_64 gen(31);
  std::uniform_int_distribution<std::int64_t> g(0, 4);
  for (int i = 0; i < 50; ++i) {
    const State s = st({q(g(gen), 4), q(g(gen), 4), q(g(gen), 4), q(g(gen), 4)});
    const auto e = exact(predict(lin, p, s));
    CHECK(e[0] == s.p[0]);
    CHECK(e[1] == s.p[1]);
    const auto n = numeric(predict(logit, p, s));
    for (int k = 0; k < 2; ++k) {
      const double clamped = std::clamp(s.p[k].to_double(), kLogitClamp, 1 - kLogitClamp);
      CHECK(std::abs(n[k] - clamped) < 1e-12);
    }
  }
}

TEST_CASE("marginal mean predictions are covariate invariant") {
  std::mt19937_64 gen(37);
  std::uniform_int_distribution<std::int64_t> g(0, 8);
  for (int i = 0; i < 50; ++i) {
    const auto e = exact(predict(PredictorSpec::marginal_mean(), uniform4(),
                                 st({q(g(gen), 8), q(g(gen), 8), q(g(gen), 8), q(g(gen), 8)})));
    CHECK(std::all_of(e.begin(), e.end(), [&](const Rational& v) { return v == e[0]; }));
  }
}
