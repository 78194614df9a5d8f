#include "cmjp/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "cmjp/errors.hpp"

namespace cmjp::io {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double to_num(const json& j) {
  if (j.is_null()) return kNaN;
  if (!j.is_number()) throw DocumentError("expected a number, got " + j.dump());
  return j.get<double>();
}

json vec_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v[i]));
  return a;
}

json mat_json(const Matrix& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(vec_json(m.row(i).transpose()));
  return a;
}

Matrix mat_from(const json& j) {
  if (!j.is_array()) throw DocumentError("expected a matrix (array of rows)");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows == 0 ? 0 : static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) throw DocumentError("ragged matrix");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = to_num(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

std::string join(const std::vector<std::string>& errs, const std::string& head) {
  std::string msg = head;
  for (const auto& e : errs) msg += "\n  " + e;
  return msg;
}

const json& need(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) throw DocumentError(std::string("missing key '") + key + "'");
  return doc.at(key);
}

// Reads a list of numbers into out, recording problems under `where`.
bool read_reals(const json& j, std::size_t expect, const std::string& where, std::vector<double>& out,
                std::vector<std::string>& errs) {
  if (!j.is_array()) {
    errs.push_back(where + " must be an array");
    return false;
  }
  if (j.size() != expect) {
    errs.push_back(where + " has " + std::to_string(j.size()) + " entries (expected " + std::to_string(expect) + ")");
    return false;
  }
  out.clear();
  bool ok = true;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      errs.push_back(where + "[" + std::to_string(i) + "] is not a number");
      ok = false;
      out.push_back(0.0);
    } else {
      out.push_back(j[i].get<double>());
    }
  }
  return ok;
}

}  // namespace

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DocumentError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DocumentError(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw DocumentError("cannot write " + path);
  out << doc.dump(2) << '\n';
  if (!out) throw DocumentError("error writing " + path);
}

json model_to_json(const ModelParams& model) {
  json q = json::array();
  for (const auto& r : model.rates) q.push_back(mat_json(r));
  return json{{"p", model.num_states},
              {"M", model.num_regimes},
              {"alpha", vec_json(model.alpha)},
              {"phi", mat_json(model.phi)},
              {"Q", q}};
}

ModelParams model_from_json(const json& doc) {
  std::vector<std::string> errs;
  if (!doc.is_object()) throw DocumentError("model document must be a JSON object");
  for (const char* key : {"p", "M", "alpha", "phi", "Q"}) {
    if (!doc.contains(key)) errs.push_back(std::string("missing key '") + key + "'");
  }
  if (!errs.empty()) throw DocumentError(join(errs, "invalid model:"));
  if (!doc["p"].is_number_integer() || doc["p"].get<long long>() < 1) errs.push_back("p must be a positive integer");
  if (!doc["M"].is_number_integer() || doc["M"].get<long long>() < 1) errs.push_back("M must be a positive integer");
  if (!errs.empty()) throw DocumentError(join(errs, "invalid model:"));

  ModelParams m;
  m.num_states = doc["p"].get<int>();
  m.num_regimes = doc["M"].get<int>();
  const auto p = static_cast<std::size_t>(m.num_states);
  const auto mm = static_cast<std::size_t>(m.num_regimes);
  std::vector<double> buf;
  m.alpha = Vector::Zero(m.num_states);
  if (read_reals(doc["alpha"], p, "alpha", buf, errs)) m.alpha = Eigen::Map<Vector>(buf.data(), m.num_states);

  m.phi = Matrix::Zero(m.num_states, m.num_regimes);
  const json& phi = doc["phi"];
  if (!phi.is_array() || phi.size() != p) {
    errs.push_back("phi must be an array of p rows");
  } else {
    for (std::size_t x = 0; x < p; ++x) {
      if (read_reals(phi[x], mm, "phi[" + std::to_string(x) + "]", buf, errs)) {
        for (std::size_t k = 0; k < mm; ++k) m.phi(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(k)) = buf[k];
      }
    }
  }
  const json& q = doc["Q"];
  if (!q.is_array() || q.size() != mm) {
    errs.push_back("Q must be an array of M matrices");
  } else {
    for (std::size_t k = 0; k < mm; ++k) {
      Matrix g = Matrix::Zero(m.num_states, m.num_states);
      if (!q[k].is_array() || q[k].size() != p) {
        errs.push_back("Q[" + std::to_string(k) + "] must have p rows");
      } else {
        for (std::size_t x = 0; x < p; ++x) {
          if (read_reals(q[k][x], p, "Q[" + std::to_string(k) + "][" + std::to_string(x) + "]", buf, errs)) {
            for (std::size_t y = 0; y < p; ++y) g(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = buf[y];
          }
        }
      }
      m.rates.push_back(std::move(g));
    }
  }
  if (errs.empty()) {
    for (auto& v : model_violations(m)) errs.push_back(std::move(v));
  }
  if (!errs.empty()) throw DocumentError(join(errs, "invalid model:"));
  return m;
}

ModelParams read_model_file(const std::string& path) {
  try {
    return model_from_json(read_json_file(path));
  } catch (const DocumentError& e) {
    throw DocumentError(path + ": " + e.what());
  }
}

json path_to_json(const PathRecord& rec) {
  json states = json::array();
  for (int s : rec.path.states) states.push_back(s + 1);
  json times = json::array();
  for (double t : rec.path.times) times.push_back(t);
  json out{{"id", rec.path.id}, {"times", times}, {"states", states}, {"horizon", rec.path.horizon}};
  if (!rec.regimes.empty()) {
    json r = json::array();
    for (int m : rec.regimes) r.push_back(m + 1);
    out["regimes"] = r;
  }
  return out;
}

PathRecord path_from_json(const json& rec, int num_states) {
  if (!rec.is_object()) throw DocumentError("path record must be a JSON object");
  std::vector<std::string> errs;
  for (const char* key : {"id", "times", "states", "horizon"}) {
    if (!rec.contains(key)) errs.push_back(std::string("missing key '") + key + "'");
  }
  if (!errs.empty()) throw DocumentError(join(errs, "invalid path record:"));
  PathRecord out;
  if (!rec["id"].is_number_integer()) errs.push_back("id must be an integer");
  else out.path.id = rec["id"].get<std::int64_t>();
  if (!rec["horizon"].is_number()) errs.push_back("horizon must be a number");
  else out.path.horizon = rec["horizon"].get<double>();
  if (!rec["times"].is_array()) {
    errs.push_back("times must be an array");
  } else {
    for (const auto& t : rec["times"]) {
      if (!t.is_number()) {
        errs.push_back("times must hold numbers");
        break;
      }
      out.path.times.push_back(t.get<double>());
    }
  }
  if (!rec["states"].is_array()) {
    errs.push_back("states must be an array");
  } else {
    for (const auto& s : rec["states"]) {
      if (!s.is_number_integer()) {
        errs.push_back("states must hold integers");
        break;
      }
      out.path.states.push_back(s.get<int>() - 1);
    }
  }
  if (rec.contains("regimes") && !rec["regimes"].is_null()) {
    if (!rec["regimes"].is_array()) {
      errs.push_back("regimes must be an array");
    } else {
      for (const auto& s : rec["regimes"]) {
        if (!s.is_number_integer() || s.get<long long>() < 1) {
          errs.push_back("regimes must hold positive integers");
          break;
        }
        out.regimes.push_back(s.get<int>() - 1);
      }
    }
  }
  if (!errs.empty()) throw DocumentError(join(errs, "invalid path record:"));
  int check_states = num_states;
  if (check_states <= 0) {
    check_states = 1;
    for (int s : out.path.states) check_states = std::max(check_states, s + 1);
  }
  try {
    validate_path(out.path, check_states);
  } catch (const InvalidArgument& e) {
    throw DocumentError(std::string("invalid path ") + std::to_string(out.path.id) + ": " + e.what());
  }
  return out;
}

void write_paths(std::ostream& out, const std::vector<PathRecord>& paths) {
  for (const auto& p : paths) out << path_to_json(p).dump() << '\n';
}

void write_paths_file(const std::string& path, const std::vector<PathRecord>& paths) {
  std::ofstream out(path);
  if (!out) throw DocumentError("cannot write " + path);
  write_paths(out, paths);
  if (!out) throw DocumentError("error writing " + path);
}

std::vector<PathRecord> read_paths(std::istream& in, int num_states) {
  std::vector<PathRecord> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(path_from_json(json::parse(line), num_states));
    } catch (const json::parse_error& e) {
      throw DocumentError("line " + std::to_string(lineno) + ": " + e.what());
    } catch (const DocumentError& e) {
      throw DocumentError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::vector<PathRecord> read_paths_file(const std::string& path, int num_states) {
  std::ifstream in(path);
  if (!in) throw DocumentError("cannot open " + path);
  try {
    return read_paths(in, num_states);
  } catch (const DocumentError& e) {
    throw DocumentError(path + ": " + e.what());
  }
}

std::vector<PathRecord> to_records(const std::vector<SimulatedPath>& sims) {
  std::vector<PathRecord> out;
  out.reserve(sims.size());
  for (const auto& s : sims) out.push_back({s.path, s.regimes});
  return out;
}

int infer_num_states(const std::vector<PathRecord>& paths) {
  int p = 0;
  for (const auto& r : paths) {
    for (int s : r.path.states) p = std::max(p, s + 1);
  }
  return p;
}

FitReport make_fit_report(const FitResult& fit, std::span<const SufficientStats> stats, const FitConfig& config) {
  FitReport r;
  r.model = fit.theta_hat;
  r.loglik = fit.loglik;
  r.aic = fit.aic;
  r.iterations = fit.iterations;
  r.converged = fit.converged;
  r.loglik_trace = fit.loglik_trace;
  r.posteriors = fit.posteriors;
  r.flags = fit.flags;
  r.config = config;
  for (const auto& s : stats) r.path_ids.push_back(s.id);
  const ParamLayout layout(fit.theta_hat.num_states, fit.theta_hat.num_regimes);
  const Vector values = to_vector(fit.theta_hat);
  try {
    r.parameters = standard_errors(observed_fisher(stats, fit.theta_hat));
  } catch (const NumericError& e) {
    r.se_error = e.what();
    r.parameters.clear();
    for (int i = 0; i < layout.size(); ++i) {
      r.parameters.push_back({layout.name(i), values[i], std::abs(values[i]) < kZeroExclusion, kNaN});
    }
  }
  return r;
}

json fit_report_to_json(const FitReport& r) {
  json params = json::array();
  for (const auto& p : r.parameters) {
    params.push_back({{"name", p.name}, {"value", num(p.value)}, {"fixed_at_zero", p.fixed_at_zero}, {"se", num(p.se)}});
  }
  json post = json::array();
  for (std::size_t k = 0; k < r.path_ids.size(); ++k) {
    post.push_back({{"id", r.path_ids[k]}, {"weights", vec_json(r.posteriors.row(static_cast<Eigen::Index>(k)).transpose())}});
  }
  json trace = json::array();
  for (double v : r.loglik_trace) trace.push_back(num(v));
  json doc{{"model", model_to_json(r.model)},
           {"loglik", num(r.loglik)},
           {"aic", num(r.aic)},
           {"iterations", r.iterations},
           {"converged", r.converged},
           {"loglik_trace", trace},
           {"parameters", params},
           {"posteriors", post},
           {"flags", r.flags},
           {"config",
            {{"regimes", r.config.num_regimes},
             {"tol", r.config.tol},
             {"max_iter", r.config.max_iter},
             {"seed", r.config.seed},
             {"restarts", r.config.restarts}}}};
  if (!r.se_error.empty()) doc["se_error"] = r.se_error;
  return doc;
}

FitReport fit_report_from_json(const json& doc) {
  try {
    FitReport r;
    r.model = model_from_json(need(doc, "model"));
    r.loglik = to_num(need(doc, "loglik"));
    r.aic = to_num(need(doc, "aic"));
    r.iterations = need(doc, "iterations").get<int>();
    r.converged = need(doc, "converged").get<bool>();
    for (const auto& v : need(doc, "loglik_trace")) r.loglik_trace.push_back(to_num(v));
    for (const auto& p : need(doc, "parameters")) {
      r.parameters.push_back({need(p, "name").get<std::string>(), to_num(need(p, "value")),
                              need(p, "fixed_at_zero").get<bool>(), to_num(need(p, "se"))});
    }
    const json& post = need(doc, "posteriors");
    r.posteriors = Matrix(static_cast<Eigen::Index>(post.size()), r.model.num_regimes);
    for (std::size_t k = 0; k < post.size(); ++k) {
      r.path_ids.push_back(need(post[k], "id").get<std::int64_t>());
      const json& w = need(post[k], "weights");
      if (w.size() != static_cast<std::size_t>(r.model.num_regimes)) throw DocumentError("posterior width differs from M");
      for (int m = 0; m < r.model.num_regimes; ++m) r.posteriors(static_cast<Eigen::Index>(k), m) = to_num(w[static_cast<std::size_t>(m)]);
    }
    r.flags = need(doc, "flags").get<std::vector<std::string>>();
    const json& c = need(doc, "config");
    r.config.num_regimes = need(c, "regimes").get<int>();
    r.config.tol = need(c, "tol").get<double>();
    r.config.max_iter = need(c, "max_iter").get<int>();
    r.config.seed = need(c, "seed").get<std::uint64_t>();
    r.config.restarts = need(c, "restarts").get<int>();
    if (doc.contains("se_error")) r.se_error = doc["se_error"].get<std::string>();
    return r;
  } catch (const json::exception& e) {
    throw DocumentError(std::string("invalid fit report: ") + e.what());
  }
}

std::vector<SelectionEntry> selection_entries(const std::vector<SelectionRow>& rows) {
  std::vector<SelectionEntry> out;
  for (const auto& r : rows) out.push_back({r.num_regimes, r.ok, r.loglik, r.aic, r.selected, r.error});
  return out;
}

json selection_to_json(const std::vector<SelectionEntry>& rows) {
  json arr = json::array();
  json selected = nullptr;
  for (const auto& r : rows) {
    json row{{"M", r.num_regimes}, {"ok", r.ok}, {"selected", r.selected}};
    if (r.ok) {
      row["loglik"] = num(r.loglik);
      row["aic"] = num(r.aic);
    } else {
      row["error"] = r.error;
    }
    if (r.selected) selected = r.num_regimes;
    arr.push_back(row);
  }
  return json{{"rows", arr}, {"selected_M", selected}};
}

std::vector<SelectionEntry> selection_from_json(const json& doc) {
  try {
    std::vector<SelectionEntry> out;
    for (const auto& row : need(doc, "rows")) {
      SelectionEntry e;
      e.num_regimes = need(row, "M").get<int>();
      e.ok = need(row, "ok").get<bool>();
      e.selected = need(row, "selected").get<bool>();
      if (e.ok) {
        e.loglik = to_num(need(row, "loglik"));
        e.aic = to_num(need(row, "aic"));
      } else {
        e.error = need(row, "error").get<std::string>();
      }
      out.push_back(std::move(e));
    }
    return out;
  } catch (const json::exception& e) {
    throw DocumentError(std::string("invalid selection table: ") + e.what());
  }
}

json asymptotics_to_json(const AsymptoticsDoc& doc, const ModelParams& model) {
  const auto& r = doc.report;
  json names = json::array();
  for (int i = 0; i < r.layout.size(); ++i) names.push_back(r.layout.name(i));
  return json{{"model", model_to_json(model)},
              {"horizon", doc.horizon},
              {"parameters", names},
              {"ic", mat_json(r.ic)},
              {"ic_inverse", mat_json(r.ic_inverse)},
              {"sigma", mat_json(r.sigma)},
              {"ip_inverse", mat_json(r.ip_inverse)},
              {"comparison",
               {{"phi_min_eigenvalue", num(r.phi_min_eigenvalue)},
                {"phi_dominates", r.phi_dominates},
                {"q_max_abs_diff", num(r.q_max_abs_diff)},
                {"q_equal", r.q_equal}}}};
}

AsymptoticsDoc asymptotics_from_json(const json& doc) {
  try {
    AsymptoticsDoc out;
    const ModelParams model = model_from_json(need(doc, "model"));
    out.horizon = need(doc, "horizon").get<double>();
    auto& r = out.report;
    r.layout = ParamLayout(model.num_states, model.num_regimes);
    r.ic = mat_from(need(doc, "ic"));
    r.ic_inverse = mat_from(need(doc, "ic_inverse"));
    r.sigma = mat_from(need(doc, "sigma"));
    r.ip_inverse = mat_from(need(doc, "ip_inverse"));
    const json& c = need(doc, "comparison");
    const double eig = to_num(need(c, "phi_min_eigenvalue"));
    r.phi_min_eigenvalue = std::isnan(eig) ? std::numeric_limits<double>::infinity() : eig;
    r.phi_dominates = need(c, "phi_dominates").get<bool>();
    r.q_max_abs_diff = to_num(need(c, "q_max_abs_diff"));
    r.q_equal = need(c, "q_equal").get<bool>();
    return out;
  } catch (const json::exception& e) {
    throw DocumentError(std::string("invalid asymptotics document: ") + e.what());
  }
}

std::string mode_name(SimulationMode mode) {
  return mode == SimulationMode::kMixture ? "mixture" : "conditional";
}

SimulationMode parse_mode(const std::string& name) {
  if (name == "conditional") return SimulationMode::kConditional;
  if (name == "mixture") return SimulationMode::kMixture;
  throw DocumentError("mode must be 'conditional' or 'mixture', got '" + name + "'");
}

StudyConfig study_config_from_json(const json& doc, const std::string& base_dir) {
  if (!doc.is_object()) throw DocumentError("study configuration must be a JSON object");
  std::vector<std::string> errs;
  StudyConfig cfg;
  try {
    if (doc.contains("model")) {
      cfg.truth = model_from_json(doc["model"]);
    } else if (doc.contains("model_file")) {
      if (!doc["model_file"].is_string()) {
        errs.push_back("model_file must be a string");
      } else {
        std::filesystem::path p = doc["model_file"].get<std::string>();
        if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
        cfg.truth = read_model_file(p.string());
      }
    } else {
      errs.push_back("missing 'model' or 'model_file'");
    }
  } catch (const DocumentError& e) {
    errs.push_back(e.what());
  }
  auto get_int = [&](const char* key, int& out, bool required) {
    if (!doc.contains(key)) {
      if (required) errs.push_back(std::string("missing key '") + key + "'");
      return;
    }
    if (!doc[key].is_number_integer()) errs.push_back(std::string(key) + " must be an integer");
    else out = doc[key].get<int>();
  };
  auto get_real = [&](const char* key, double& out, bool required) {
    if (!doc.contains(key)) {
      if (required) errs.push_back(std::string("missing key '") + key + "'");
      return;
    }
    if (!doc[key].is_number()) errs.push_back(std::string(key) + " must be a number");
    else out = doc[key].get<double>();
  };
  get_int("replications", cfg.replications, true);
  get_real("horizon", cfg.horizon, true);
  get_real("tol", cfg.tol, false);
  get_int("max_iter", cfg.max_iter, false);
  get_int("restarts", cfg.restarts, false);
  get_int("threads", cfg.threads, false);
  if (!doc.contains("seed")) errs.push_back("missing key 'seed'");
  else if (!doc["seed"].is_number_integer() || doc["seed"].get<long long>() < 0) errs.push_back("seed must be a non-negative integer");
  else cfg.seed = doc["seed"].get<std::uint64_t>();
  if (!doc.contains("paths")) {
    errs.push_back("missing key 'paths'");
  } else if (!doc["paths"].is_array()) {
    errs.push_back("paths must be a list of path counts");
  } else {
    for (const auto& k : doc["paths"]) {
      if (!k.is_number_integer()) {
        errs.push_back("paths entries must be integers");
        break;
      }
      cfg.path_counts.push_back(k.get<int>());
    }
  }
  if (doc.contains("mode")) {
    try {
      cfg.mode = parse_mode(doc["mode"].is_string() ? doc["mode"].get<std::string>() : doc["mode"].dump());
    } catch (const DocumentError& e) {
      errs.push_back(e.what());
    }
  }
  // Model problems were already reported by the model parser.
  for (auto& e : study_config_violations(cfg)) {
    if (e.rfind("model:", 0) != 0) errs.push_back(std::move(e));
  }
  if (!errs.empty()) throw DocumentError(join(errs, "invalid study configuration:"));
  return cfg;
}

json study_config_to_json(const StudyConfig& c) {
  return json{{"model", model_to_json(c.truth)}, {"replications", c.replications}, {"paths", c.path_counts},
              {"horizon", c.horizon},           {"seed", c.seed},                 {"tol", c.tol},
              {"max_iter", c.max_iter},         {"restarts", c.restarts},         {"threads", c.threads},
              {"mode", mode_name(c.mode)}};
}

json study_report_to_json(const StudyReport& report) {
  json blocks = json::array();
  json ks = json::array();
  json med_bias = json::array();
  json med_rmse = json::array();
  json bias_series = json::object();
  json rmse_series = json::object();
  for (const auto& b : report.blocks) {
    json params = json::array();
    for (const auto& s : b.parameters) {
      params.push_back({{"name", s.name},
                        {"true", num(s.true_value)},
                        {"mean", num(s.mean)},
                        {"bias", num(s.bias)},
                        {"rmse", num(s.rmse)},
                        {"empirical_se", num(s.empirical_se)},
                        {"mean_jse", num(s.mean_jse)},
                        {"jse_count", s.jse_count},
                        {"ks_statistic", num(s.ks_statistic)},
                        {"ks_p_value", num(s.ks_p_value)}});
      bias_series[s.name].push_back(num(s.bias));
      rmse_series[s.name].push_back(num(s.rmse));
    }
    blocks.push_back({{"K", b.paths},
                      {"succeeded", b.succeeded},
                      {"failed", b.failed},
                      {"failures", b.failures},
                      {"median_abs_bias", num(b.median_abs_bias)},
                      {"median_rmse", num(b.median_rmse)},
                      {"parameters", params}});
    ks.push_back(b.paths);
    med_bias.push_back(num(b.median_abs_bias));
    med_rmse.push_back(num(b.median_rmse));
  }
  return json{{"replications", report.replications},
              {"horizon", report.horizon},
              {"seed", report.seed},
              {"blocks", blocks},
              {"series",
               {{"K", ks},
                {"median_abs_bias", med_bias},
                {"median_rmse", med_rmse},
                {"bias", bias_series},
                {"rmse", rmse_series}}}};
}

StudyReport study_report_from_json(const json& doc) {
  try {
    StudyReport r;
    r.replications = need(doc, "replications").get<int>();
    r.horizon = need(doc, "horizon").get<double>();
    r.seed = need(doc, "seed").get<std::uint64_t>();
    for (const auto& jb : need(doc, "blocks")) {
      StudyBlock b;
      b.paths = need(jb, "K").get<int>();
      b.succeeded = need(jb, "succeeded").get<int>();
      b.failed = need(jb, "failed").get<int>();
      b.failures = need(jb, "failures").get<std::vector<std::string>>();
      b.median_abs_bias = to_num(need(jb, "median_abs_bias"));
      b.median_rmse = to_num(need(jb, "median_rmse"));
      for (const auto& p : need(jb, "parameters")) {
        ParameterSummary s;
        s.name = need(p, "name").get<std::string>();
        s.true_value = to_num(need(p, "true"));
        s.mean = to_num(need(p, "mean"));
        s.bias = to_num(need(p, "bias"));
        s.rmse = to_num(need(p, "rmse"));
        s.empirical_se = to_num(need(p, "empirical_se"));
        s.mean_jse = to_num(need(p, "mean_jse"));
        s.jse_count = need(p, "jse_count").get<int>();
        s.ks_statistic = to_num(need(p, "ks_statistic"));
        s.ks_p_value = to_num(need(p, "ks_p_value"));
        b.parameters.push_back(std::move(s));
      }
      r.blocks.push_back(std::move(b));
    }
    return r;
  } catch (const json::exception& e) {
    throw DocumentError(std::string("invalid study report: ") + e.what());
  }
}

}  // namespace cmjp::io
