#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "../tools/commands.hpp"
#include "cmjp/io.hpp"

using cmjp::io::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cmjp::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path dir;
  explicit TempDir(const std::string& name) : dir(fs::temp_directory_path() / name) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~TempDir() { fs::remove_all(dir); }
  std::string operator/(const std::string& f) const { return (dir / f).string(); }
};

}  // namespace

TEST_CASE("usage errors exit 1") {
  CHECK(run({}).code == 1);
  CHECK(run({"bogus"}).code == 1);
  CHECK(run({"simulate", "--model", "data/two_regime_model.json"}).code == 1);
  CHECK(run({"simulate", "--model", "data/two_regime_model.json", "--paths", "x", "--horizon", "1"}).code == 1);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("simulate is deterministic and prints a drawn seed") {
  const std::vector<std::string> args{"simulate", "--model", "data/three_regime_model.json", "--paths", "2",
                                      "--horizon", "30", "--seed", "9"};
  const Run a = run(args), b = run(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  std::istringstream lines(a.out);
  const auto recs = cmjp::io::read_paths(lines);
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].regimes.size() == recs[0].path.states.size());
  CHECK(a.err.empty());

  const Run unseeded = run({"simulate", "--model", "data/three_regime_model.json", "--paths", "1", "--horizon", "5"});
  CHECK(unseeded.code == 0);
  CHECK(unseeded.err.rfind("seed: ", 0) == 0);

  const Run mix = run({"simulate", "--model", "data/three_regime_model.json", "--paths", "3", "--horizon", "30",
                       "--seed", "1", "--mode", "mixture"});
  std::istringstream ml(mix.out);
  for (const auto& r : cmjp::io::read_paths(ml)) CHECK(r.regimes.size() == 1);
}

TEST_CASE("data errors exit 2") {
  TempDir tmp("cmjp_cli_errors");
  std::ofstream(tmp / "bad.json") << R"({"p": 2, "M": 1, "alpha": [0.5, 0.6], "phi": [[1],[1]], "Q": [[[-1,1],[1,-1]]]})";
  const Run r = run({"simulate", "--model", tmp / "bad.json", "--paths", "1", "--horizon", "1", "--seed", "1"});
  CHECK(r.code == 2);
  CHECK(r.err.find("alpha") != std::string::npos);
  CHECK(run({"fit", "--paths", tmp / "missing.jsonl", "--seed", "1"}).code == 2);
  std::ofstream(tmp / "empty.jsonl") << "\n";
  CHECK(run({"fit", "--paths", tmp / "empty.jsonl", "--seed", "1"}).code == 2);
  CHECK(run({"simulate", "--model", "data/two_regime_model.json", "--paths", "0", "--horizon", "1", "--seed", "1"})
            .code == 2);
}

TEST_CASE("numerical failures exit 3") {
  TempDir tmp("cmjp_cli_numeric");
  // A zero off-diagonal rate has no expected information.
  std::ofstream(tmp / "zero.json")
      << R"({"p": 2, "M": 1, "alpha": [0.5, 0.5], "phi": [[1],[1]], "Q": [[[0,0],[1,-1]]]})";
  const Run r = run({"asymptotics", "--model", tmp / "zero.json", "--horizon", "5"});
  CHECK(r.code == 3);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("simulate -> fit -> select pipeline") {
  TempDir tmp("cmjp_cli_pipeline");
  REQUIRE(run({"simulate", "--model", "data/two_regime_model.json", "--paths", "800", "--horizon", "30", "--seed",
               "3", "--out", tmp / "paths.jsonl"})
              .code == 0);
  const Run f = run({"fit", "--paths", tmp / "paths.jsonl", "--regimes", "2", "--seed", "4", "--out",
                     tmp / "fit.json"});
  CHECK(f.code == 0);
  const json report = cmjp::io::read_json_file(tmp / "fit.json");
  const auto parsed = cmjp::io::fit_report_from_json(report);
  CHECK(parsed.model.num_regimes == 2);
  CHECK(parsed.posteriors.rows() == 800);
  CHECK(cmjp::io::fit_report_to_json(parsed) == report);

  // The fitted model block is itself a model file.
  std::ofstream(tmp / "fitted_model.json") << report["model"].dump();
  CHECK(run({"simulate", "--model", tmp / "fitted_model.json", "--paths", "5", "--horizon", "10", "--seed", "1"})
            .code == 0);

  const Run again = run({"fit", "--paths", tmp / "paths.jsonl", "--regimes", "2", "--seed", "4"});
  CHECK(cmjp::io::read_json_file(tmp / "fit.json") == json::parse(again.out));

  const Run s = run({"select", "--paths", tmp / "paths.jsonl", "--max-regimes", "3", "--seed", "2"});
  CHECK(s.code == 0);
  const json table = json::parse(s.out);
  CHECK(table["rows"].size() == 3);
  CHECK(cmjp::io::selection_to_json(cmjp::io::selection_from_json(table)) == table);

  const Run one = run({"select", "--paths", tmp / "paths.jsonl", "--max-regimes", "1", "--seed", "2"});
  CHECK(json::parse(one.out)["selected_M"] == 1);
}

TEST_CASE("asymptotics and verify") {
  const Run a = run({"asymptotics", "--model", "data/three_regime_model.json", "--horizon", "30"});
  REQUIRE(a.code == 0);
  const json doc = json::parse(a.out);
  CHECK(doc["sigma"][0][0].get<double>() == doctest::Approx(0.75));
  CHECK(doc["ic_inverse"][0][0].get<double>() == doctest::Approx(5.25));
  CHECK(doc["comparison"]["q_equal"] == true);

  TempDir tmp("cmjp_cli_verify");
  const std::string model = fs::absolute("data/two_regime_model.json").string();
  std::ofstream(tmp / "study.json") << json{{"model_file", model}, {"replications", 5}, {"paths", {100}},
                                           {"horizon", 30.0}, {"seed", 1}}
                                           .dump();
  const Run v = run({"verify", "--config", tmp / "study.json", "--threads", "2"});
  CHECK(v.code == 0);
  const json rep = json::parse(v.out);
  CHECK(rep["blocks"].size() == 1);
  CHECK(run({"verify", "--config", tmp / "study.json", "--threads", "1"}).out == v.out);

  std::ofstream(tmp / "bad.json") << json{{"replications", 0}, {"paths", json::array()}}.dump();
  const Run bad = run({"verify", "--config", tmp / "bad.json"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("replications") != std::string::npos);
  CHECK(bad.err.find("seed") != std::string::npos);
}
