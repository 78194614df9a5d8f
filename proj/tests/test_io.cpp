#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "cmjp/io.hpp"
#include "cmjp/likelihood.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace cmjp;
using cmjp::io::json;

namespace {

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const io::DocumentError& e) {
    return e.what();
  }
  return {};
}

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

}  // namespace

TEST_CASE("model round trip") {
  const auto m = fixtures::three_regime_model();
  const json j = io::model_to_json(m);
  CHECK(j["p"] == 3);
  CHECK(j["M"] == 3);
  const ModelParams back = io::model_from_json(j);
  CHECK(back.alpha == m.alpha);
  CHECK(back.phi == m.phi);
  CHECK(back.rates == m.rates);
  CHECK(io::model_to_json(back) == j);
}

TEST_CASE("shipped model files load") {
  const auto three = io::read_model_file("data/three_regime_model.json");
  CHECK(three.rates == fixtures::three_regime_model().rates);
  CHECK(three.phi == fixtures::three_regime_model().phi);
  const auto two = io::read_model_file("data/two_regime_model.json");
  CHECK(two.rates == fixtures::two_regime_model().rates);
}

TEST_CASE("model validation reports every problem") {
  json j = io::model_to_json(fixtures::three_regime_model());
  j["alpha"] = {0.5, 0.5, 0.5};
  j["Q"][2][1][1] = 1.0;
  const std::string msg = error_of([&] { io::model_from_json(j); });
  CHECK(contains(msg, "alpha"));
  CHECK(contains(msg, "Q[3] row 2"));

  json missing = json::object();
  const std::string msg2 = error_of([&] { io::model_from_json(missing); });
  for (const char* key : {"'p'", "'M'", "'alpha'", "'phi'", "'Q'"}) CHECK(contains(msg2, key));

  json short_q = io::model_to_json(fixtures::three_regime_model());
  short_q["Q"].erase(2);
  CHECK(contains(error_of([&] { io::model_from_json(short_q); }), "Q"));

  json bad_type = io::model_to_json(fixtures::three_regime_model());
  bad_type["alpha"][0] = "x";
  CHECK(contains(error_of([&] { io::model_from_json(bad_type); }), "alpha[0]"));

  CHECK(contains(error_of([] { io::read_model_file("no/such/file.json"); }), "no/such/file.json"));
}

TEST_CASE("paths round trip, 1-based on disk") {
  const auto sims = simulate_paths(fixtures::two_regime_model(), 25, 10.0, 3, SimulationMode::kConditional);
  const auto recs = io::to_records(sims);
  std::stringstream ss;
  io::write_paths(ss, recs);
  const std::string text = ss.str();
  const json first = json::parse(text.substr(0, text.find('\n')));
  CHECK(first["states"][0] == sims[0].path.states[0] + 1);
  CHECK(first["id"] == 1);

  const auto back = io::read_paths(ss);
  REQUIRE(back.size() == recs.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].path.times == recs[i].path.times);
    CHECK(back[i].path.states == recs[i].path.states);
    CHECK(back[i].path.horizon == recs[i].path.horizon);
    CHECK(back[i].regimes == recs[i].regimes);
  }
  CHECK(io::infer_num_states(back) <= 3);

  const auto path = std::filesystem::temp_directory_path() / "cmjp_io_paths.jsonl";
  io::write_paths_file(path.string(), recs);
  CHECK(io::read_paths_file(path.string()).size() == recs.size());
  std::filesystem::remove(path);
}

TEST_CASE("path parsing errors carry line numbers") {
  std::stringstream ok_then_bad;
  ok_then_bad << R"({"id":1,"times":[0],"states":[1],"horizon":2})" << "\n\n"
              << R"({"id":2,"times":[0,1.5,1.0],"states":[1,2,1],"horizon":2})" << "\n";
  const std::string msg = error_of([&] { io::read_paths(ok_then_bad); });
  CHECK(contains(msg, "line 3"));

  std::stringstream garbage("{not json\n");
  CHECK(contains(error_of([&] { io::read_paths(garbage); }), "line 1"));

  std::stringstream missing(R"({"id":1,"times":[0]})");
  const std::string m2 = error_of([&] { io::read_paths(missing); });
  CHECK(contains(m2, "states"));
  CHECK(contains(m2, "horizon"));

  std::stringstream zero_state(R"({"id":1,"times":[0],"states":[0],"horizon":2})");
  CHECK_FALSE(error_of([&] { io::read_paths(zero_state); }).empty());

  std::stringstream out_of_range(R"({"id":1,"times":[0],"states":[4],"horizon":2})");
  CHECK_FALSE(error_of([&] { io::read_paths(out_of_range, 3); }).empty());

  std::stringstream blank("\n\n");
  CHECK(io::read_paths(blank).empty());
}

TEST_CASE("fit report round trip") {
  const auto model = fixtures::two_regime_model();
  const auto stats = oracle::simulate_stats(model, 200, 30.0, 2);
  FitConfig c;
  c.num_regimes = 2;
  c.seed = 4;
  const FitResult fr = fit(stats, c);
  const io::FitReport rep = io::make_fit_report(fr, stats, c);
  CHECK(rep.parameters.size() == 15);
  CHECK(rep.path_ids.size() == 200);
  const json j = io::fit_report_to_json(rep);
  const io::FitReport back = io::fit_report_from_json(j);
  CHECK(io::fit_report_to_json(back) == j);
  CHECK(back.loglik == rep.loglik);
  CHECK(back.model.rates == rep.model.rates);
  CHECK(back.posteriors == rep.posteriors);
  CHECK(back.config.seed == 4);
}

TEST_CASE("selection round trip") {
  std::vector<io::SelectionEntry> rows{{1, true, -10.0, 30.0, false, ""},
                                       {2, true, -5.0, 28.0, true, ""},
                                       {3, false, 0.0, 0.0, false, "boom"}};
  const json j = io::selection_to_json(rows);
  CHECK(j["selected_M"] == 2);
  const auto back = io::selection_from_json(j);
  CHECK(io::selection_to_json(back) == j);
  CHECK(back[2].error == "boom");
}

TEST_CASE("asymptotics round trip") {
  const auto model = fixtures::three_regime_model();
  const io::AsymptoticsDoc doc{30.0, cramer_rao(model, 30.0)};
  const json j = io::asymptotics_to_json(doc, model);
  CHECK(j.contains("ic_inverse"));
  const io::AsymptoticsDoc back = io::asymptotics_from_json(j);
  CHECK(back.report.sigma == doc.report.sigma);
  CHECK(back.report.ip_inverse == doc.report.ip_inverse);
  CHECK(io::asymptotics_to_json(back, model) == j);
}

TEST_CASE("study config and report") {
  json cfg = {{"model_file", "three_regime_model.json"}, {"replications", 3}, {"paths", {40, 80}},
              {"horizon", 10.0}, {"seed", 5}, {"mode", "mixture"}};
  const StudyConfig c = io::study_config_from_json(cfg, "data");
  CHECK(c.truth.num_regimes == 3);
  CHECK(c.mode == SimulationMode::kMixture);
  CHECK(c.path_counts == std::vector<int>{40, 80});
  const StudyConfig again = io::study_config_from_json(io::study_config_to_json(c));
  CHECK(again.truth.rates == c.truth.rates);
  CHECK(again.seed == 5);

  json bad = cfg;
  bad.erase("model_file");
  bad["replications"] = 0;
  const std::string msg = error_of([&] { io::study_config_from_json(bad, "data"); });
  CHECK(contains(msg, "model"));

  StudyConfig small = c;
  small.truth = fixtures::two_regime_model();
  small.replications = 3;
  small.path_counts = {60};
  const StudyReport rep = monte_carlo_study(small);
  const json rj = io::study_report_to_json(rep);
  CHECK(rj.contains("series"));
  const StudyReport back = io::study_report_from_json(rj);
  CHECK(io::study_report_to_json(back) == rj);

  CHECK(io::parse_mode("conditional") == SimulationMode::kConditional);
  CHECK(io::mode_name(SimulationMode::kMixture) == "mixture");
  CHECK_THROWS_AS(io::parse_mode("other"), io::DocumentError);
}

TEST_CASE("non-finite numbers are written as null") {
  io::FitReport rep;
  rep.model = fixtures::two_regime_model();
  rep.loglik = std::numeric_limits<double>::quiet_NaN();
  rep.posteriors = Matrix::Zero(0, 2);
  const json j = io::fit_report_to_json(rep);
  CHECK(j["loglik"].is_null());
  CHECK(std::isnan(io::fit_report_from_json(j).loglik));
}
