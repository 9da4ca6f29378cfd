#include "doctest.h"
#include "limreg/experiments.hpp"

#include <sstream>

using namespace limreg;
using nlohmann::json;

namespace {

Rational q(std::int64_t n, std::int64_t d = 1) { return Rational(n, d); }

State parse_state(const std::string& text) {
  State s;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ';')) s.p.push_back(Rational::parse(part));
  return s;
}

const ResultRow& find_row(const ResultTable& t, const std::string& welfare, const std::string& predictor,
                          const std::string& threshold) {
  for (const auto& r : t.rows)
    if (r.welfare_id == welfare && r.predictor == predictor && r.threshold == threshold) return r;
  FAIL("row not found: " << welfare << " " << predictor << " " << threshold);
  throw std::logic_error("unreachable");
}

}  // namespace

TEST_CASE("presets survive a render/parse round trip") {
  for (const auto& c : {table2_preset(), table1_preset(), mmr_preset(), mc_preset()}) {
    const auto doc = render_config(c);
    CHECK(parse_config(doc) == c);
    CHECK(parse_config(json::parse(doc.dump())) == c);
    CHECK(config_hash(parse_config(doc)) == config_hash(c));
  }
  CHECK(config_hash(table2_preset()) != config_hash(mmr_preset()));
}

TEST_CASE("config validation") {
  auto doc = render_config(table2_preset());
  doc["problem"]["welfare"][0]["values"][0] = 0.5;
  try {
    parse_config(doc);
    FAIL("decimal accepted");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("1/2") != std::string::npos);
  }

  doc = render_config(table2_preset());
  doc["problem"]["welfare"][0]["values"][0] = "0.5";
  CHECK_THROWS_AS(parse_config(doc), ConfigError);

  doc = render_config(table2_preset());
  doc["problem"]["weights"][0] = "1/2";
  CHECK_THROWS_AS(parse_config(doc), ConfigError);

  doc = render_config(table2_preset());
  doc["bogus"] = 1;
  CHECK_THROWS_AS(parse_config(doc), ConfigError);

  doc = render_config(table2_preset());
  doc["predictors"] = json::array({"probit"});
  CHECK_THROWS_AS(parse_config(doc), ConfigError);

  doc = render_config(table1_preset());
  doc["table1"]["step"] = "0";
  CHECK_THROWS_AS(parse_config(doc), ConfigError);
}

TEST_CASE("csv layout") {
  auto c = table2_preset();
  c.predictors = {PredictorSpec::marginal_mean()};
  const auto table = run_table2(c);
  const auto csv = render_csv(table);
  CHECK(csv.substr(0, csv.find('\n')) ==
        "welfare_id,predictor,threshold,mr_decimal,mr_exact,argmax_state,method,boundary_events");
  CHECK(csv.find("U=1/2,marginal-mean,1/2,0.250000000000,1/4,") != std::string::npos);
  const auto md = render_markdown(table);
  CHECK(md.find("| welfare_id") != std::string::npos);
}

TEST_CASE("table2 preset cells") {
  const auto t = run_table2(table2_preset());
  CHECK(*find_row(t, "U=1/4", "linear", "7/8").mr_exact == q(1, 8));
  CHECK(*find_row(t, "U=1/5;2/5;3/5;4/5", "correct", "1/2").mr_exact == q(1, 5));
  CHECK(*find_row(t, "U=1/2", "correct", "3/8").mr_exact == q(1, 8));
  CHECK(find_row(t, "U=1/2", "correct", "3/8").method == "closed_form");
  CHECK(*find_row(t, "U=1/10;3/10;7/10;9/10", "no-data", "-").mr_exact == q(1, 5));
  bool footnote = false;
  for (const auto& f : t.footnotes) footnote = footnote || f.find("U=1/2, correct, t=3/8") != std::string::npos;
  CHECK(footnote);
}

TEST_CASE("every grid cell is re-derivable from its argmax state") {
  const auto c = table2_preset();
  const auto t = run_table2(c);
  for (const auto& row : t.rows) {
    if (row.method != "grid") continue;
    std::size_t w = 0;
    while (c.welfare[w].id != row.welfare_id) ++w;
    const auto problem = c.problem(w);
    const auto state = parse_state(row.argmax_state);
    std::vector<std::vector<Rational>> singleton;
    for (const auto& v : state.p) singleton.push_back({v});
    const auto spec = PredictorSpec::parse(row.predictor);
    const auto policy = invariant_policy(Rational::parse(row.threshold), problem.size());
    CHECK(max_regret(problem, spec, policy, StateGrid(singleton)).mr == *row.mr_exact);
  }
}

TEST_CASE("mmr preset") {
  auto c = mmr_preset();
  auto t = run_mmr(c);
  const ResultRow* correct = nullptr;
  for (const auto& r : t.rows) if (r.predictor == "correct") correct = &r;
  REQUIRE(correct != nullptr);
  CHECK(*correct->mr_exact == q(3, 10));
  bool half_ties = false;
  for (const auto& cand : t.manifest["rows"][0]["candidates"])
    half_ties = half_ties || (cand["threshold"] == "1/2" && cand["mr"] == "3/10");
  CHECK(half_ties);
  CHECK(*find_row(t, c.welfare[0].id, "no-data", "forced").mr_exact == q(1, 5));

  c.mode = ThresholdMode::PerCovariate;
  c.per_covariate_thresholds = {{q(1, 5), q(1, 2)}, {q(1, 2), q(4, 5)}};
  t = run_mmr(c);
  bool zero = false;
  for (const auto& r : t.rows) zero = zero || (r.predictor == "correct" && *r.mr_exact == q(0));
  CHECK(zero);
}

TEST_CASE("table1 verification on explicit cases") {
  auto c = table1_preset();
  c.table1->random = 0;
  c.table1->cases = {{q(1, 2), q(7, 10), q(7, 10)}, {q(1, 2), q(1, 2), q(1, 2)}};
  const auto t = run_table1_verify(c);
  CHECK(t.passed);
  CHECK(t.manifest["failures"] == 0);
}

TEST_CASE("random binary cases are seeded") {
  const auto a = random_binary_cases(20, 7);
  const auto b = random_binary_cases(20, 7);
  CHECK(a == b);
  CHECK(a != random_binary_cases(20, 8));
  for (const auto& bc : a) {
    CHECK(bc.p0 > q(0));
    CHECK(bc.p0 < q(1));
  }
}

TEST_CASE("rendered output does not depend on thread count") {
  auto c = table2_preset();
  const auto one = render_csv(run_table2(c, {1}));
  CHECK(render_csv(run_table2(c, {4})) == one);
  CHECK(run_table2(c, {1}).manifest.dump() == run_table2(c, {3}).manifest.dump());
  auto m = mc_preset();
  m.mc->reps = 20;
  m.mc->sample_sizes = {50};
  CHECK(render_csv(run_mc(m, {1})) == render_csv(run_mc(m, {5})));
}
