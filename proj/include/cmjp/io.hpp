#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cmjp/em.hpp"
#include "cmjp/errors.hpp"
#include "cmjp/inference.hpp"
#include "cmjp/model.hpp"
#include "cmjp/simulate.hpp"

// JSON documents and JSON-lines path files. States and regimes are 1-based on
// disk. Every document type has a writer and a parser; a parsed document
// written again produces the same JSON.
namespace cmjp::io {

using nlohmann::json;

// Thrown for malformed or invalid documents; lists every problem found.
class DocumentError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& doc);

// --- model ---------------------------------------------------------------
json model_to_json(const ModelParams& model);
ModelParams model_from_json(const json& doc);
ModelParams read_model_file(const std::string& path);

// --- paths ---------------------------------------------------------------
struct PathRecord {
  Path path;
  std::vector<int> regimes;  // 0-based; empty when absent
};

json path_to_json(const PathRecord& rec);
// num_states = 0 skips the state-range check.
PathRecord path_from_json(const json& rec, int num_states = 0);
void write_paths(std::ostream& out, const std::vector<PathRecord>& paths);
void write_paths_file(const std::string& path, const std::vector<PathRecord>& paths);
std::vector<PathRecord> read_paths(std::istream& in, int num_states = 0);
std::vector<PathRecord> read_paths_file(const std::string& path, int num_states = 0);
std::vector<PathRecord> to_records(const std::vector<SimulatedPath>& sims);
// Largest state label used by any path (1-based count).
int infer_num_states(const std::vector<PathRecord>& paths);

// --- fit report ----------------------------------------------------------
struct FitReport {
  ModelParams model;
  double loglik = 0.0;
  double aic = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> loglik_trace;
  std::vector<ParameterSE> parameters;
  std::string se_error;                // set when standard errors were unavailable
  std::vector<std::int64_t> path_ids;
  Matrix posteriors;                   // K x M
  std::vector<std::string> flags;
  FitConfig config;
};

FitReport make_fit_report(const FitResult& fit, std::span<const SufficientStats> stats, const FitConfig& config);
json fit_report_to_json(const FitReport& report);
FitReport fit_report_from_json(const json& doc);

// --- model selection -----------------------------------------------------
struct SelectionEntry {
  int num_regimes = 0;
  bool ok = false;
  double loglik = 0.0;
  double aic = 0.0;
  bool selected = false;
  std::string error;
};

std::vector<SelectionEntry> selection_entries(const std::vector<SelectionRow>& rows);
json selection_to_json(const std::vector<SelectionEntry>& rows);
std::vector<SelectionEntry> selection_from_json(const json& doc);

// --- asymptotics ---------------------------------------------------------
struct AsymptoticsDoc {
  double horizon = 0.0;
  CramerRaoReport report;
};

json asymptotics_to_json(const AsymptoticsDoc& doc, const ModelParams& model);
AsymptoticsDoc asymptotics_from_json(const json& doc);

// --- Monte Carlo study ---------------------------------------------------
// Inline "model" object or a "model_file" path (resolved relative to
// base_dir), plus replications, paths (list), horizon, seed and optional
// tol, max_iter, restarts, threads, mode.
StudyConfig study_config_from_json(const json& doc, const std::string& base_dir = ".");
json study_config_to_json(const StudyConfig& config);
json study_report_to_json(const StudyReport& report);
StudyReport study_report_from_json(const json& doc);

std::string mode_name(SimulationMode mode);
SimulationMode parse_mode(const std::string& name);

}  // namespace cmjp::io
