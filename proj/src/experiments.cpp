#include "limreg/experiments.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>

#include "limreg/closed_form.hpp"
#include "limreg/montecarlo.hpp"
#include "limreg/parallel.hpp"

namespace limreg {

using nlohmann::json;

namespace {

json base_manifest(const ExperimentConfig& config, const char* command) {
  json m;
  m["command"] = command;
  m["config_hash"] = config_hash(config);
  json sizes = json::array();
  for (const auto& l : config.grid) sizes.push_back(l.size());
  m["grid_sizes"] = sizes;
  m["state_count"] = config.state_grid().count();
  const LogitSolverSettings solver;
  m["solver"] = {{"method", "levenberg-marquardt multistart"},
                 {"start_values", solver.start_values},
                 {"box", solver.box},
                 {"initial_damping", solver.initial_damping},
                 {"step_tol", solver.step_tol},
                 {"grad_tol", solver.grad_tol},
                 {"max_iterations", solver.max_iterations},
                 {"tie_tolerance", kTieTolerance},
                 {"logit_clamp", kLogitClamp}};
  m["rows"] = json::array();
  return m;
}

std::string policy_sup_state(const ThresholdPolicy& policy) {
  State s;
  for (const auto& e : policy) s.p.push_back(e.t());
  return format_state(s);
}

ResultRow exact_row(std::string welfare, std::string predictor, std::string threshold, Rational mr,
                    std::string argmax, std::string method, int boundary = 0) {
  ResultRow r;
  r.welfare_id = std::move(welfare);
  r.predictor = std::move(predictor);
  r.threshold = std::move(threshold);
  r.mr_exact = mr;
  r.mr_value = mr.to_double();
  r.argmax_state = std::move(argmax);
  r.method = std::move(method);
  r.boundary_events = boundary;
  return r;
}

json breakdown_json(const std::vector<Rational>& b) {
  json out = json::array();
  for (const auto& v : b) out.push_back(v.str());
  return out;
}

void record(ResultTable& table, const ResultRow& row, json extra = json::object()) {
  extra["welfare_id"] = row.welfare_id;
  extra["predictor"] = row.predictor;
  extra["threshold"] = row.threshold;
  extra["method"] = row.method;
  table.manifest["rows"].push_back(std::move(extra));
  table.rows.push_back(row);
}

/// Predictions depend on the welfare vector only for the shifted predictor.
class TableCache {
 public:
  TableCache(const ExperimentConfig& config, int threads) : config_(config), threads_(threads) {}

  const PredictionTable& get(const Problem& problem, const PredictorSpec& spec, std::size_t welfare) {
    const auto key = spec.name() + (spec.kind == PredictorSpec::Kind::Shifted ? "#" + std::to_string(welfare) : "");
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      it = cache_.emplace(key, tabulate_predictions(problem, spec, config_.state_grid(), threads_)).first;
    }
    return it->second;
  }

 private:
  const ExperimentConfig& config_;
  int threads_;
  std::map<std::string, PredictionTable> cache_;
};

ResultRow grid_row(const std::string& welfare, const PredictorSpec& spec, const ThresholdPolicy& policy,
                   const RegretReport& report) {
  return exact_row(welfare, spec.name(), format_policy(policy), report.mr,
                   format_state(report.argmax_states.front()), "grid", report.boundary_events);
}

json report_json(const RegretReport& report) {
  return {{"argmax_count", report.argmax_states.size()}, {"breakdown", breakdown_json(report.breakdown)}};
}

}  // namespace

ResultTable run_table2(const ExperimentConfig& config, const RunOptions& options) {
  ResultTable table;
  table.manifest = base_manifest(config, "table2");
  TableCache cache(config, options.threads);
  const auto grid = config.state_grid();
  for (std::size_t w = 0; w < config.welfare.size(); ++w) {
    const auto problem = config.problem(w);
    const auto& id = config.welfare[w].id;
    record(table, exact_row(id, "no-data", "-", no_data_mmr(problem), "", "closed_form"));
    for (const auto& spec : config.predictors) {
      for (const auto& t : config.thresholds) {
        const auto policy = invariant_policy(t, problem.size());
        if (spec.kind == PredictorSpec::Kind::Correct) {
          const auto closed = correct_spec_mr(problem, policy);
          const auto on_grid = max_regret(problem, cache.get(problem, spec, w), policy, options.threads);
          record(table, exact_row(id, spec.name(), t.str(), closed, policy_sup_state(policy), "closed_form"),
                 {{"grid_mr", on_grid.mr.str()}});
          if (on_grid.mr != closed) {
            table.footnotes.push_back(id + ", correct, t=" + t.str() + ": closed-form supremum " +
                                      closed.str() + "; grid search gives " + on_grid.mr.str() +
                                      " at " + format_state(on_grid.argmax_states.front()));
          }
          continue;
        }
        const auto report = max_regret(problem, cache.get(problem, spec, w), policy, options.threads);
        record(table, grid_row(id, spec, policy, report), report_json(report));
      }
    }
  }
  return table;
}

std::vector<BinaryCase> random_binary_cases(int count, std::uint64_t seed) {
  SplitMix64 gen(mix64(seed));
  std::uniform_int_distribution<std::int64_t> pick(1, 999);
  std::vector<BinaryCase> out;
  for (int i = 0; i < count; ++i) {
    const Rational p0(pick(gen), 1000);
    const Rational u0(pick(gen), 1000);
    const Rational u1(pick(gen), 1000);
    out.push_back({p0, u0, u1});
  }
  return out;
}

ResultTable run_table1_verify(const ExperimentConfig& config, const RunOptions& options) {
  if (!config.table1) throw ConfigError("table1-verify needs a \"table1\" block");
  const auto& t1 = *config.table1;
  if (t1.step <= Rational(0)) throw ConfigError("table1.step must be positive");
  auto cases = t1.cases;
  const auto drawn = random_binary_cases(t1.random, t1.seed);
  cases.insert(cases.end(), drawn.begin(), drawn.end());
  const auto steps = t1.step.den();
  const Rational tolerance = Rational(2) * t1.step;

  std::vector<BinaryMarginalCase> closed(cases.size());
  std::vector<BinaryGridMax> brute(cases.size());
  parallel_for(cases.size(), options.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto& c = cases[i];
      closed[i] = table1_mr(c.p0, Rational(1) - c.p0, c.u0, c.u1);
      brute[i] = table1_brute_force(c.p0, c.u0, c.u1, steps);
    }
  });

  ResultTable table;
  table.manifest = base_manifest(config, "table1-verify");
  table.manifest["step"] = t1.step.str();
  table.manifest["tolerance"] = tolerance.str();
  table.manifest["seed"] = t1.seed;
  int failures = 0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& c = cases[i];
    const auto id = "P0=" + c.p0.str() + ";U0=" + c.u0.str() + ";U1=" + c.u1.str();
    const auto gap = abs(closed[i].mr - brute[i].mr);
    const bool pass = gap <= tolerance;
    failures += pass ? 0 : 1;
    json detail = {{"cell", to_string(closed[i].cell)}, {"gap", gap.str()}, {"pass", pass}};
    record(table, exact_row(id, "marginal-mean", closed[i].t_star.str(), closed[i].mr, "", "closed_form"),
           detail);
    record(table,
           exact_row(id, "marginal-mean", closed[i].t_star.str(), brute[i].mr,
                     brute[i].q0.str() + ";" + brute[i].q1.str(), "grid"),
           detail);
  }
  table.passed = failures == 0;
  table.manifest["cases"] = cases.size();
  table.manifest["failures"] = failures;
  table.footnotes.push_back(std::to_string(cases.size() - failures) + " of " + std::to_string(cases.size()) +
                            " configurations agree within " + tolerance.str());
  return table;
}

ResultTable run_mmr(const ExperimentConfig& config, const RunOptions& options) {
  ResultTable table;
  table.manifest = base_manifest(config, "mmr");
  const auto grid = config.state_grid();
  const auto tgrid = config.threshold_grid();
  SearchOptions search;
  search.threads = options.threads;
  search.policy_cap = config.policy_cap;
  for (std::size_t w = 0; w < config.welfare.size(); ++w) {
    const auto problem = config.problem(w);
    const auto& id = config.welfare[w].id;
    const auto policies = enumerate_policies(tgrid, config.mode, problem.size(), config.policy_cap);
    for (const auto& spec : config.predictors) {
      json candidates = json::array();
      std::optional<ResultRow> best;
      if (spec.kind == PredictorSpec::Kind::Correct) {
        std::optional<PredictionTable> table_for_forced;
        for (const auto& policy : policies) {
          const bool interior = std::all_of(policy.begin(), policy.end(), [](const auto& e) { return e.is_value(); });
          ResultRow row;
          if (interior) {
            row = exact_row(id, spec.name(), format_policy(policy), correct_spec_mr(problem, policy),
                            policy_sup_state(policy), "closed_form");
          } else {
            if (!table_for_forced) table_for_forced = tabulate_predictions(problem, spec, grid, options.threads);
            row = grid_row(id, spec, policy, max_regret(problem, *table_for_forced, policy, options.threads));
          }
          candidates.push_back({{"threshold", row.threshold}, {"mr", row.mr_exact->str()}, {"method", row.method}});
          if (!best || *row.mr_exact < *best->mr_exact) best = row;
        }
      } else {
        const auto result = minimize_over_thresholds(problem, spec, grid, tgrid, config.mode, search);
        for (const auto& r : result.per_threshold_mr) {
          const auto row = grid_row(id, spec, r.policy, r.report);
          candidates.push_back({{"threshold", row.threshold}, {"mr", row.mr_exact->str()}, {"method", "grid"}});
          if (!best || *row.mr_exact < *best->mr_exact) best = row;
        }
      }
      record(table, *best, {{"candidates", candidates}});
    }
    record(table, exact_row(id, "no-data", "forced", no_data_mmr(problem), "", "closed_form"));
  }
  return table;
}

ResultTable run_mc(const ExperimentConfig& config, const RunOptions& options) {
  if (!config.mc) throw ConfigError("mc needs an \"mc\" block");
  const auto& mc = *config.mc;
  ResultTable table;
  table.manifest = base_manifest(config, "mc");
  table.manifest["seed"] = mc.seed;
  table.manifest["reps"] = mc.reps;
  const auto grid = config.state_grid();
  const auto policies =
      enumerate_policies(config.threshold_grid(), config.mode, config.covariates.size(), config.policy_cap);
  for (std::size_t w = 0; w < config.welfare.size(); ++w) {
    const auto problem = config.problem(w);
    const auto& id = config.welfare[w].id;
    for (const auto& name : mc.estimators) {
      const auto estimator = parse_estimator(name);
      const auto limit_spec = estimator == Estimator::MarginalMean ? PredictorSpec::marginal_mean()
                              : estimator == Estimator::LinearLS   ? PredictorSpec::linear_wls()
                                                                   : PredictorSpec::logit_nls();
      const auto limit_table = tabulate_predictions(problem, limit_spec, grid, options.threads);
      for (const auto& policy : policies) {
        const auto limit = max_regret(problem, limit_table, policy, options.threads);
        record(table, grid_row(id, limit_spec, policy, limit), report_json(limit));
        for (auto n : mc.sample_sizes) {
          const auto fs = finite_sample_mr(problem, estimator, policy, grid, n, mc.reps, mc.seed,
                                           options.threads, mc.draw_budget);
          ResultRow row;
          row.welfare_id = id;
          row.predictor = std::string(to_string(estimator)) + "[N=" + std::to_string(n) + "]";
          row.threshold = format_policy(policy);
          row.mr_value = fs.estimate.mean;
          row.argmax_state = format_state(fs.argmax);
          row.method = "mc";
          record(table, row,
                 {{"n", n},
                  {"std_error", fs.estimate.std_error},
                  {"reps", fs.estimate.reps},
                  {"skipped", fs.estimate.skipped},
                  {"unconverged", fs.estimate.unconverged},
                  {"seed", fs.estimate.seed}});
        }
      }
    }
  }
  return table;
}

ResultTable run_compute(const ExperimentConfig& config, const RunOptions& options) {
  ResultTable table;
  table.manifest = base_manifest(config, "compute");
  TableCache cache(config, options.threads);
  for (std::size_t w = 0; w < config.welfare.size(); ++w) {
    const auto problem = config.problem(w);
    const auto policies =
        enumerate_policies(config.threshold_grid(), config.mode, problem.size(), config.policy_cap);
    for (const auto& spec : config.predictors) {
      const auto& preds = cache.get(problem, spec, w);
      for (const auto& policy : policies) {
        const auto report = max_regret(problem, preds, policy, options.threads);
        record(table, grid_row(config.welfare[w].id, spec, policy, report), report_json(report));
      }
    }
  }
  return table;
}

std::string format_mr(const ResultRow& row) {
  if (row.mr_exact) return row.mr_exact->decimal(12);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12f", row.mr_value);
  return buf;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::vector<std::string> cells(const ResultRow& r) {
  return {r.welfare_id, r.predictor,        r.threshold, format_mr(r), r.mr_exact ? r.mr_exact->str() : "",
          r.argmax_state, r.method, std::to_string(r.boundary_events)};
}

const std::vector<std::string> kColumns{"welfare_id",   "predictor", "threshold", "mr_decimal", "mr_exact",
                                        "argmax_state", "method",    "boundary_events"};

}  // namespace

std::string render_csv(const ResultTable& table) {
  std::ostringstream os;
  for (std::size_t i = 0; i < kColumns.size(); ++i) os << (i ? "," : "") << kColumns[i];
  os << '\n';
  for (const auto& r : table.rows) {
    const auto c = cells(r);
    for (std::size_t i = 0; i < c.size(); ++i) os << (i ? "," : "") << csv_field(c[i]);
    os << '\n';
  }
  return os.str();
}

std::string render_markdown(const ResultTable& table) {
  std::vector<std::vector<std::string>> body;
  std::vector<std::size_t> width;
  for (const auto& c : kColumns) width.push_back(c.size());
  for (const auto& r : table.rows) {
    body.push_back(cells(r));
    for (std::size_t i = 0; i < width.size(); ++i) width[i] = std::max(width[i], body.back()[i].size());
  }
  std::ostringstream os;
  const auto line = [&](const std::vector<std::string>& v) {
    os << '|';
    for (std::size_t i = 0; i < v.size(); ++i) os << ' ' << v[i] << std::string(width[i] - v[i].size(), ' ') << " |";
    os << '\n';
  };
  line(kColumns);
  os << '|';
  for (auto w : width) os << std::string(w + 2, '-') << '|';
  os << '\n';
  for (const auto& b : body) line(b);
  if (!table.footnotes.empty()) {
    os << '\n';
    for (const auto& f : table.footnotes) os << "- " << f << '\n';
  }
  return os.str();
}

}  // namespace limreg
