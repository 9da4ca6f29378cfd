#include "limreg/predictors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace limreg {

PredictorSpec PredictorSpec::shifted(Rational t) {
  if (t < Rational(0) || t > Rational(1)) throw DomainError("shift target outside [0,1]");
  return {Kind::Shifted, t, Model::Linear, 2};
}

PredictorSpec PredictorSpec::interpolating(Model model, int k) {
  if (k < 1) throw DomainError("interpolating head size must be positive");
  return {Kind::Interpolating, {}, model, k};
}

std::string PredictorSpec::name() const {
  switch (kind) {
    case Kind::Correct:
      return "correct";
    case Kind::Shifted:
      return "shifted(" + shift_target.str() + ")";
    case Kind::MarginalMean:
      return "marginal-mean";
    case Kind::LinearWLS:
      return "linear";
    case Kind::LogitNLS:
      return "logit";
    case Kind::Interpolating:
      return std::string(model == Model::Linear ? "interp-linear(" : "interp-logit(") +
             std::to_string(k) + ")";
  }
  return "?";
}

PredictorSpec PredictorSpec::parse(const std::string& name) {
  auto arg = [&](std::size_t open) {
    if (name.back() != ')') throw std::invalid_argument("unterminated predictor option: " + name);
    return name.substr(open + 1, name.size() - open - 2);
  };
  if (name == "correct") return correct();
  if (name == "marginal-mean") return marginal_mean();
  if (name == "linear") return linear_wls();
  if (name == "logit") return logit_nls();
  if (name.rfind("shifted(", 0) == 0) return shifted(Rational::parse(arg(7)));
  if (name.rfind("interp-linear(", 0) == 0) return interpolating(Model::Linear, std::stoi(arg(13)));
  if (name.rfind("interp-logit(", 0) == 0) return interpolating(Model::Logit, std::stoi(arg(12)));
  throw std::invalid_argument("unknown predictor \"" + name + "\"");
}

bool PredictorSpec::exact() const {
  return !(kind == Kind::LogitNLS || (kind == Kind::Interpolating && model == Model::Logit));
}

void validate_spec(const PredictorSpec& spec, const Problem& problem) {
  using K = PredictorSpec::Kind;
  const auto& xs = problem.covariates();
  const auto distinct = [&](std::size_t upto) {
    for (std::size_t i = 1; i < upto; ++i) {
      if (xs[i] != xs[0]) return true;
    }
    return false;
  };
  switch (spec.kind) {
    case K::LinearWLS:
    case K::LogitNLS:
      if (!distinct(xs.size())) throw DegenerateDesign("least-squares fit needs two distinct covariates");
      break;
    case K::Interpolating:
      if (spec.k < 1 || static_cast<std::size_t>(spec.k) > problem.size()) {
        throw DomainError("interpolating head size " + std::to_string(spec.k) + " outside [1, " +
                          std::to_string(problem.size()) + "]");
      }
      if (spec.k != 2) {
        throw DomainError("arity mismatch: two-parameter model cannot interpolate " +
                          std::to_string(spec.k) + " points");
      }
      break;
    default:
      break;
  }
}

double logistic(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

FittedParams fit_linear_weighted(std::span<const Rational> x, std::span<const Rational> w,
                                 std::span<const Rational> target) {
  if (x.size() != w.size() || x.size() != target.size()) throw ShapeError("fit inputs differ in length");
  Rational sw;
  Rational mean_x;
  Rational mean_y;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    mean_x += w[i] * x[i];
    mean_y += w[i] * target[i];
  }
  if (sw <= Rational(0)) throw DegenerateDesign("fit weights sum to zero");
  mean_x /= sw;
  mean_y /= sw;
  Rational var;
  Rational cov;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto dx = x[i] - mean_x;
    var += w[i] * dx * dx;
    cov += w[i] * dx * (target[i] - mean_y);
  }
  if (var == Rational(0)) throw DegenerateDesign("covariate has zero variance under the fit weights");
  const auto b = cov / var;
  const auto a = mean_y - b * mean_x;
  Rational mse;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto r = target[i] - (a + b * x[i]);
    mse += w[i] * r * r;
  }
  FittedParams out;
  out.exact_a = a;
  out.exact_b = b;
  out.exact_mse = mse;
  out.a = a.to_double();
  out.b = b.to_double();
  out.mse = mse.to_double();
  return out;
}

double logistic_objective(std::span<const double> x, std::span<const double> w,
                          std::span<const double> target, double a, double b,
                          std::array<double, 2>* gradient) {
  double f = 0.0;
  std::array<double, 2> g{0.0, 0.0};
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double s = logistic(a + b * x[i]);
    const double r = target[i] - s;
    f += w[i] * r * r;
    const double d = -2.0 * w[i] * r * s * (1.0 - s);
    g[0] += d;
    g[1] += d * x[i];
  }
  if (gradient != nullptr) *gradient = g;
  return f;
}

namespace {

constexpr double kAsymptoteStep = 0.5;

struct LocalFit {
  double a;
  double b;
  double mse;
  bool converged;
  int iterations;
};

LocalFit levenberg_marquardt(std::span<const double> x, std::span<const double> w,
                             std::span<const double> target, double a, double b,
                             const LogitSolverSettings& cfg) {
  const auto clamp = [&](double v) { return std::clamp(v, -cfg.box, cfg.box); };
  a = clamp(a);
  b = clamp(b);
  double lambda = cfg.initial_damping;
  double f = logistic_objective(x, w, target, a, b);
  for (int it = 0; it < cfg.max_iterations; ++it) {
    // Gauss-Newton pieces for residual r_i = target_i - s_i with d r_i / d(a,b) = -s'(1, x_i).
    double h00 = 0.0, h01 = 0.0, h11 = 0.0, g0 = 0.0, g1 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double s = logistic(a + b * x[i]);
      const double ds = s * (1.0 - s);
      const double r = target[i] - s;
      h00 += w[i] * ds * ds;
      h01 += w[i] * ds * ds * x[i];
      h11 += w[i] * ds * ds * x[i] * x[i];
      g0 += w[i] * r * ds;
      g1 += w[i] * r * ds * x[i];
    }
    // Projected gradient: components pushing outward at an active face vanish.
    auto free_component = [&](double param, double ascent) {
      const bool blocked = (param >= cfg.box && ascent > 0) || (param <= -cfg.box && ascent < 0);
      return blocked ? 0.0 : ascent;
    };
    const double pg0 = free_component(a, g0);
    const double pg1 = free_component(b, g1);
    if (std::hypot(pg0, pg1) * 2.0 < cfg.grad_tol) {
      // A flat gradient with a long Gauss-Newton step is a saturating asymptote: keep walking to the box.
      const double det = h00 * h11 - h01 * h01;
      const double ga = det > 0 ? (h11 * g0 - h01 * g1) / det : 0.0;
      const double gb = det > 0 ? (h00 * g1 - h01 * g0) / det : 0.0;
      const double reach = std::hypot(clamp(a + ga) - a, clamp(b + gb) - b);
      if (!(reach >= kAsymptoteStep)) return {a, b, f, true, it};
    }

    while (true) {
      const double m00 = h00 + lambda;
      const double m11 = h11 + lambda;
      const double det = m00 * m11 - h01 * h01;
      const double da = (m11 * g0 - h01 * g1) / det;
      const double db = (m00 * g1 - h01 * g0) / det;
      const double na = clamp(a + da);
      const double nb = clamp(b + db);
      const double step = std::hypot(na - a, nb - b);
      if (!(step >= cfg.step_tol) || !std::isfinite(det)) return {a, b, f, true, it};
      const double nf = logistic_objective(x, w, target, na, nb);
      if (nf < f) {
        a = na;
        b = nb;
        f = nf;
        lambda = std::max(lambda / 10.0, 1e-300);
        break;
      }
      lambda *= 10.0;
    }
  }
  return {a, b, f, false, cfg.max_iterations};
}

}  // namespace

std::vector<FittedParams> fit_logistic_all_starts(std::span<const double> x, std::span<const double> w,
                                                  std::span<const double> target,
                                                  const LogitSolverSettings& settings) {
  if (x.size() != w.size() || x.size() != target.size()) throw ShapeError("fit inputs differ in length");
  std::vector<FittedParams> out;
  int index = 0;
  for (double a0 : settings.start_values) {
    for (double b0 : settings.start_values) {
      const auto local = levenberg_marquardt(x, w, target, a0, b0, settings);
      FittedParams f;
      f.a = local.a;
      f.b = local.b;
      f.mse = local.mse;
      f.converged = local.converged;
      f.at_bound = std::abs(local.a) >= settings.box || std::abs(local.b) >= settings.box;
      f.start = index++;
      f.iterations = local.iterations;
      out.push_back(f);
    }
  }
  return out;
}

FittedParams fit_logistic_weighted(std::span<const double> x, std::span<const double> w,
                                   std::span<const double> target,
                                   const LogitSolverSettings& settings) {
  const auto fits = fit_logistic_all_starts(x, w, target, settings);
  if (fits.empty()) throw SolverError("logistic least squares: no start values", FittedParams{});
  const FittedParams* best = &fits.front();
  bool any_converged = false;
  for (const auto& f : fits) {
    any_converged = any_converged || f.converged;
    if (f.mse < best->mse) best = &f;
  }
  if (!any_converged) throw SolverError("logistic least squares: no start converged", *best);
  return *best;
}

FittedParams fit_linear_wls(const Problem& problem, const State& state) {
  validate_state(problem, state);
  return fit_linear_weighted(problem.covariates(), problem.weights(), state.p);
}

namespace {

std::vector<double> to_doubles(std::span<const Rational> v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& r : v) out.push_back(r.to_double());
  return out;
}

}  // namespace

FittedParams fit_logit_nls(const Problem& problem, const State& state,
                           const LogitSolverSettings& settings) {
  validate_state(problem, state);
  const auto x = to_doubles(problem.covariates());
  const auto w = to_doubles(problem.weights());
  const auto y = to_doubles(state.p);
  return fit_logistic_weighted(x, w, y, settings);
}

FittedParams fit_interpolating(const Problem& problem, const State& state,
                               PredictorSpec::Model model, int k) {
  validate_state(problem, state);
  validate_spec(PredictorSpec::interpolating(model, std::max(k, 1)), problem);
  const auto& xs = problem.covariates();
  if (xs[0] == xs[1]) throw DegenerateDesign("interpolation head covariates coincide");
  FittedParams out;
  if (model == PredictorSpec::Model::Linear) {
    const auto b = (state.p[1] - state.p[0]) / (xs[1] - xs[0]);
    const auto a = state.p[0] - b * xs[0];
    Rational mse;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const auto r = state.p[i] - (a + b * xs[i]);
      mse += problem.weights()[i] * r * r;
    }
    out.exact_a = a;
    out.exact_b = b;
    out.exact_mse = mse;
    out.a = a.to_double();
    out.b = b.to_double();
    out.mse = mse.to_double();
    return out;
  }
  const auto link = [](double p) {
    const double c = std::clamp(p, kLogitClamp, 1.0 - kLogitClamp);
    return std::log(c / (1.0 - c));
  };
  const double x0 = xs[0].to_double();
  const double x1 = xs[1].to_double();
  const double l0 = link(state.p[0].to_double());
  const double l1 = link(state.p[1].to_double());
  out.b = (l1 - l0) / (x1 - x0);
  out.a = l0 - out.b * x0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = state.p[i].to_double() - logistic(out.a + out.b * xs[i].to_double());
    out.mse += problem.weights()[i].to_double() * r * r;
  }
  return out;
}

Predictions predict(const PredictorSpec& spec, const Problem& problem, const State& state,
                    const LogitSolverSettings& settings) {
  using K = PredictorSpec::Kind;
  validate_state(problem, state);
  const auto& xs = problem.covariates();
  const auto n = problem.size();
  switch (spec.kind) {
    case K::Correct:
      return state.p;
    case K::Shifted: {
      std::vector<Rational> out;
      out.reserve(n);
      for (std::size_t i = 0; i < n; ++i) {
        out.push_back(state.p[i] - (problem.optimal_thresholds()[i] - spec.shift_target));
      }
      return out;
    }
    case K::MarginalMean:
      return std::vector<Rational>(n, marginal_mean(problem, state));
    case K::LinearWLS:
    case K::Interpolating:
      if (spec.kind == K::LinearWLS || spec.model == PredictorSpec::Model::Linear) {
        const auto fit = spec.kind == K::LinearWLS
                             ? fit_linear_wls(problem, state)
                             : fit_interpolating(problem, state, spec.model, spec.k);
        std::vector<Rational> out;
        out.reserve(n);
        for (const auto& x : xs) out.push_back(*fit.exact_a + *fit.exact_b * x);
        return out;
      }
      [[fallthrough]];
    case K::LogitNLS: {
      const auto fit = spec.kind == K::LogitNLS ? fit_logit_nls(problem, state, settings)
                                                : fit_interpolating(problem, state, spec.model, spec.k);
      std::vector<double> out;
      out.reserve(n);
      for (const auto& x : xs) out.push_back(logistic(fit.a + fit.b * x.to_double()));
      return out;
    }
  }
  throw DomainError("unhandled predictor kind");
}

}  // namespace limreg
