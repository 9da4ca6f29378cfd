#include "limreg/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "limreg/montecarlo.hpp"

namespace limreg {

using nlohmann::json;

namespace {

Rational rational_field(const json& v, const std::string& where) {
  if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
  if (v.is_number()) {
    try {
      Rational::parse(v.dump());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  if (!v.is_string()) throw ConfigError(where + ": expected a fraction string like \"1/4\"");
  try {
    return Rational::parse(v.get<std::string>());
  } catch (const std::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

std::vector<Rational> rational_list(const json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError(where + ": expected an array");
  std::vector<Rational> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(rational_field(v[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::vector<std::vector<Rational>> rational_lists(const json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError(where + ": expected an array of arrays");
  std::vector<std::vector<Rational>> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(rational_list(v[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

json render_list(const std::vector<Rational>& v) {
  json out = json::array();
  for (const auto& r : v) out.push_back(r.str());
  return out;
}

json render_lists(const std::vector<std::vector<Rational>>& v) {
  json out = json::array();
  for (const auto& l : v) out.push_back(render_list(l));
  return out;
}

void reject_unknown(const json& obj, std::initializer_list<const char*> keys, const std::string& where) {
  for (const auto& [k, _] : obj.items()) {
    bool known = false;
    for (const char* allowed : keys) known = known || k == allowed;
    if (!known) throw ConfigError(where + ": unknown key \"" + k + "\"");
  }
}

template <typename T>
T get_as(const json& obj, const char* key, const std::string& where, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

std::vector<Rational> step_values(const Rational& step) {
  if (step <= Rational(0) || step > Rational(1)) throw ConfigError("grid.step must lie in (0,1]");
  std::vector<Rational> v;
  for (Rational x; x < Rational(1); x += step) v.push_back(x);
  v.emplace_back(1);
  return v;
}

std::vector<Rational> eighths() {
  std::vector<Rational> t;
  for (int k = 1; k <= 7; ++k) t.emplace_back(k, 8);
  return t;
}

std::vector<Rational> quarters() { return step_values(Rational(1, 4)); }

}  // namespace

Problem ExperimentConfig::problem(std::size_t welfare_index) const {
  return Problem(covariates, weights, welfare.at(welfare_index).values);
}

StateGrid ExperimentConfig::state_grid() const { return StateGrid(grid); }

ThresholdGrid ExperimentConfig::threshold_grid() const {
  return ThresholdGrid{thresholds, per_covariate_thresholds, include_force};
}

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config root must be an object");
  reject_unknown(doc, {"problem", "grid", "predictors", "thresholds", "mc", "table1", "output"}, "config");
  ExperimentConfig c;

  if (!doc.contains("problem")) throw ConfigError("config: missing \"problem\" block");
  const auto& pb = doc.at("problem");
  reject_unknown(pb, {"covariates", "weights", "welfare"}, "problem");
  if (!pb.contains("welfare")) throw ConfigError("problem: missing \"welfare\"");
  const auto& wl = pb.at("welfare");
  if (!wl.is_array() || wl.empty()) throw ConfigError("problem.welfare: expected a nonempty array");
  for (std::size_t i = 0; i < wl.size(); ++i) {
    const std::string where = "problem.welfare[" + std::to_string(i) + "]";
    WelfareSpec w;
    if (wl[i].is_object()) {
      reject_unknown(wl[i], {"id", "values"}, where);
      w.id = get_as<std::string>(wl[i], "id", where, "");
      if (!wl[i].contains("values")) throw ConfigError(where + ": missing \"values\"");
      w.values = rational_list(wl[i].at("values"), where + ".values");
    } else {
      w.values = rational_list(wl[i], where);
    }
    if (w.id.empty()) w.id = "w" + std::to_string(i);
    c.welfare.push_back(std::move(w));
  }
  const auto n = c.welfare.front().values.size();
  if (pb.contains("covariates")) {
    c.covariates = rational_list(pb.at("covariates"), "problem.covariates");
  } else {
    for (std::size_t i = 0; i < n; ++i) c.covariates.emplace_back(static_cast<std::int64_t>(i));
  }
  if (pb.contains("weights")) {
    c.weights = rational_list(pb.at("weights"), "problem.weights");
  } else {
    c.weights.assign(n, Rational(1, static_cast<std::int64_t>(n)));
  }
  for (std::size_t i = 0; i < c.welfare.size(); ++i) {
    try {
      (void)c.problem(i);
    } catch (const std::exception& e) {
      throw ConfigError("problem (welfare " + c.welfare[i].id + "): " + e.what());
    }
  }

  const json grid = doc.value("grid", json::object());
  reject_unknown(grid, {"step", "values", "per_covariate"}, "grid");
  if (grid.contains("per_covariate")) {
    c.grid = rational_lists(grid.at("per_covariate"), "grid.per_covariate");
    if (c.grid.size() != n) throw ConfigError("grid.per_covariate: need one list per covariate");
  } else if (grid.contains("values")) {
    c.grid.assign(n, rational_list(grid.at("values"), "grid.values"));
  } else {
    const auto step = grid.contains("step") ? rational_field(grid.at("step"), "grid.step") : Rational(1, 4);
    c.grid.assign(n, step_values(step));
  }
  try {
    (void)c.state_grid();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }

  if (doc.contains("predictors")) {
    const auto& pr = doc.at("predictors");
    if (!pr.is_array()) throw ConfigError("predictors: expected an array of names");
    for (const auto& p : pr) {
      if (!p.is_string()) throw ConfigError("predictors: expected predictor names as strings");
      try {
        c.predictors.push_back(PredictorSpec::parse(p.get<std::string>()));
      } catch (const std::exception& e) {
        throw ConfigError(std::string("predictors: ") + e.what());
      }
    }
  }

  const json th = doc.value("thresholds", json::object());
  reject_unknown(th, {"values", "per_covariate", "mode", "include_force", "policy_cap"}, "thresholds");
  c.thresholds = th.contains("values") ? rational_list(th.at("values"), "thresholds.values") : eighths();
  if (th.contains("per_covariate")) {
    c.per_covariate_thresholds = rational_lists(th.at("per_covariate"), "thresholds.per_covariate");
  }
  c.include_force = get_as<bool>(th, "include_force", "thresholds", false);
  c.policy_cap = get_as<std::uint64_t>(th, "policy_cap", "thresholds", kDefaultPolicyCap);
  const auto mode = get_as<std::string>(th, "mode", "thresholds", "invariant");
  if (mode == "invariant") {
    c.mode = ThresholdMode::Invariant;
  } else if (mode == "per-covariate") {
    c.mode = ThresholdMode::PerCovariate;
  } else {
    throw ConfigError("thresholds.mode: expected \"invariant\" or \"per-covariate\"");
  }
  for (const auto& t : c.thresholds) {
    if (t < Rational(0) || t > Rational(1)) throw ConfigError("thresholds.values: " + t.str() + " outside [0,1]");
  }

  if (doc.contains("mc")) {
    const auto& m = doc.at("mc");
    reject_unknown(m, {"n", "reps", "seed", "estimators", "draw_budget"}, "mc");
    McConfig mc;
    mc.sample_sizes = get_as<std::vector<std::uint64_t>>(m, "n", "mc", mc.sample_sizes);
    mc.reps = get_as<int>(m, "reps", "mc", mc.reps);
    mc.seed = get_as<std::uint64_t>(m, "seed", "mc", mc.seed);
    mc.estimators = get_as<std::vector<std::string>>(m, "estimators", "mc", mc.estimators);
    mc.draw_budget = get_as<std::uint64_t>(m, "draw_budget", "mc", mc.draw_budget);
    if (mc.reps < 2) throw ConfigError("mc.reps must be at least 2");
    for (auto size : mc.sample_sizes) {
      if (size < 1) throw ConfigError("mc.n entries must be positive");
    }
    for (const auto& e : mc.estimators) {
      try {
        (void)parse_estimator(e);
      } catch (const std::exception& ex) {
        throw ConfigError(std::string("mc.estimators: ") + ex.what());
      }
    }
    c.mc = mc;
  }

  if (doc.contains("table1")) {
    const auto& t = doc.at("table1");
    reject_unknown(t, {"cases", "random", "seed", "step"}, "table1");
    Table1Config t1;
    if (t.contains("cases")) {
      const auto& cases = t.at("cases");
      if (!cases.is_array()) throw ConfigError("table1.cases: expected an array");
      for (std::size_t i = 0; i < cases.size(); ++i) {
        const std::string where = "table1.cases[" + std::to_string(i) + "]";
        reject_unknown(cases[i], {"p0", "u0", "u1"}, where);
        if (!cases[i].contains("p0") || !cases[i].contains("u0") || !cases[i].contains("u1")) {
          throw ConfigError(where + ": needs p0, u0 and u1");
        }
        t1.cases.push_back({rational_field(cases[i].at("p0"), where + ".p0"),
                            rational_field(cases[i].at("u0"), where + ".u0"),
                            rational_field(cases[i].at("u1"), where + ".u1")});
      }
    }
    t1.random = get_as<int>(t, "random", "table1", 0);
    t1.seed = get_as<std::uint64_t>(t, "seed", "table1", t1.seed);
    if (t.contains("step")) t1.step = rational_field(t.at("step"), "table1.step");
    if (t1.step <= Rational(0) || t1.step > Rational(1) || t1.step.num() != 1) {
      throw ConfigError("table1.step must be 1/m for a positive integer m");
    }
    if (t1.random < 0) throw ConfigError("table1.random must be nonnegative");
    c.table1 = t1;
  }

  const json out = doc.value("output", json::object());
  reject_unknown(out, {"path", "format"}, "output");
  c.output_path = get_as<std::string>(out, "path", "output", "");
  c.format = get_as<std::string>(out, "format", "output", "csv");
  if (c.format != "csv" && c.format != "md") throw ConfigError("output.format: expected csv or md");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  return parse_config(doc);
}

json render_config(const ExperimentConfig& c) {
  json doc;
  json welfare = json::array();
  for (const auto& w : c.welfare) welfare.push_back({{"id", w.id}, {"values", render_list(w.values)}});
  doc["problem"] = {{"covariates", render_list(c.covariates)},
                    {"weights", render_list(c.weights)},
                    {"welfare", welfare}};
  doc["grid"] = {{"per_covariate", render_lists(c.grid)}};
  json preds = json::array();
  for (const auto& p : c.predictors) preds.push_back(p.name());
  doc["predictors"] = preds;
  json th = {{"values", render_list(c.thresholds)},
             {"mode", c.mode == ThresholdMode::Invariant ? "invariant" : "per-covariate"},
             {"include_force", c.include_force},
             {"policy_cap", c.policy_cap}};
  if (!c.per_covariate_thresholds.empty()) th["per_covariate"] = render_lists(c.per_covariate_thresholds);
  doc["thresholds"] = th;
  if (c.mc) {
    doc["mc"] = {{"n", c.mc->sample_sizes},
                 {"reps", c.mc->reps},
                 {"seed", c.mc->seed},
                 {"estimators", c.mc->estimators},
                 {"draw_budget", c.mc->draw_budget}};
  }
  if (c.table1) {
    json cases = json::array();
    for (const auto& bc : c.table1->cases) {
      cases.push_back({{"p0", bc.p0.str()}, {"u0", bc.u0.str()}, {"u1", bc.u1.str()}});
    }
    doc["table1"] = {{"cases", cases},
                     {"random", c.table1->random},
                     {"seed", c.table1->seed},
                     {"step", c.table1->step.str()}};
  }
  doc["output"] = {{"path", c.output_path}, {"format", c.format}};
  return doc;
}

std::string config_hash(const ExperimentConfig& config) {
  auto doc = render_config(config);
  doc.erase("output");
  const auto text = doc.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig table2_preset() {
  ExperimentConfig c;
  c.covariates = {0, 1, 2, 3};
  c.weights.assign(4, Rational(1, 4));
  c.welfare = {
      {"U=1/2", std::vector<Rational>(4, Rational(1, 2))},
      {"U=1/4", std::vector<Rational>(4, Rational(1, 4))},
      {"U=1/5;2/5;3/5;4/5", {Rational(1, 5), Rational(2, 5), Rational(3, 5), Rational(4, 5)}},
      {"U=1/10;3/10;7/10;9/10", {Rational(1, 10), Rational(3, 10), Rational(7, 10), Rational(9, 10)}},
  };
  c.grid.assign(4, quarters());
  c.predictors = {PredictorSpec::marginal_mean(), PredictorSpec::linear_wls(), PredictorSpec::logit_nls(),
                  PredictorSpec::correct()};
  c.thresholds = eighths();
  return c;
}

ExperimentConfig table1_preset() {
  ExperimentConfig c;
  c.covariates = {0, 1};
  c.weights = {Rational(1, 2), Rational(1, 2)};
  c.welfare = {{"binary", {Rational(7, 10), Rational(7, 10)}}};
  c.grid.assign(2, quarters());
  c.predictors = {PredictorSpec::marginal_mean()};
  c.thresholds = eighths();
  Table1Config t1;
  t1.random = 200;
  t1.seed = 7;
  c.table1 = t1;
  return c;
}

ExperimentConfig mmr_preset() {
  ExperimentConfig c;
  c.covariates = {0, 1};
  c.weights = {Rational(1, 2), Rational(1, 2)};
  c.welfare = {{"U=4/5;1/5", {Rational(4, 5), Rational(1, 5)}}};
  c.grid.assign(2, quarters());
  c.predictors = {PredictorSpec::correct()};
  c.thresholds = eighths();
  return c;
}

ExperimentConfig mc_preset() {
  auto c = table2_preset();
  c.welfare.resize(1);
  c.predictors = {PredictorSpec::marginal_mean()};
  c.thresholds = {Rational(1, 2)};
  McConfig mc;
  mc.sample_sizes = {100, 1000};
  c.mc = mc;
  return c;
}

}  // namespace limreg
