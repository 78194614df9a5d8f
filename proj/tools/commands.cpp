#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>

#include <CLI11.hpp>

#include "cmjp/errors.hpp"
#include "cmjp/io.hpp"

namespace cmjp::cli {
namespace {

using io::json;

void emit(const std::string& target, const std::string& text, std::ostream& out) {
  if (target == "-") {
    out << text;
    return;
  }
  std::ofstream f(target);
  if (!f) throw io::DocumentError("cannot write " + target);
  f << text;
  if (!f) throw io::DocumentError("error writing " + target);
}

void emit_json(const std::string& target, const json& doc, std::ostream& out) {
  emit(target, doc.dump(2) + "\n", out);
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed, std::ostream& err) {
  if (seed) return *seed;
  std::random_device rd;
  const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  err << "seed: " << s << "\n";
  return s;
}

std::vector<SufficientStats> load_stats(const std::string& file, int states, int min_states = 1) {
  const auto records = io::read_paths_file(file, states);
  if (records.empty()) throw io::DocumentError(file + ": no path records");
  const int p = states > 0 ? states : std::max(min_states, io::infer_num_states(records));
  std::vector<SufficientStats> stats;
  stats.reserve(records.size());
  for (const auto& r : records) stats.push_back(path_stats(r.path, p));
  return stats;
}

struct SimulateArgs {
  std::string model;
  int paths = 0;
  double horizon = 0.0;
  std::optional<std::uint64_t> seed;
  std::string mode = "conditional";
  std::string out = "-";
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  const ModelParams model = io::read_model_file(a.model);
  const SimulationMode mode = io::parse_mode(a.mode);
  if (a.paths < 1) throw InvalidArgument("--paths must be >= 1");
  if (!(a.horizon > 0.0)) throw InvalidArgument("--horizon must be > 0");
  const std::uint64_t seed = resolve_seed(a.seed, err);
  const auto sims = simulate_paths(model, a.paths, a.horizon, seed, mode);
  std::ostringstream text;
  io::write_paths(text, io::to_records(sims));
  emit(a.out, text.str(), out);
  return kOk;
}

struct FitArgs {
  std::string paths;
  int regimes = 1;
  double tol = 1e-5;
  int max_iter = 2000;
  std::optional<std::uint64_t> seed;
  int restarts = 1;
  int states = 0;
  std::string out = "-";
};

int cmd_fit(const FitArgs& a, std::ostream& out, std::ostream& err) {
  const auto stats = load_stats(a.paths, a.states);
  FitConfig cfg;
  cfg.num_regimes = a.regimes;
  cfg.tol = a.tol;
  cfg.max_iter = a.max_iter;
  cfg.restarts = a.restarts;
  const auto errs = config_violations(cfg);
  if (!errs.empty()) {
    std::string msg = "invalid fit options:";
    for (const auto& e : errs) msg += "\n  " + e;
    throw InvalidArgument(msg);
  }
  if (static_cast<int>(stats.size()) < cfg.num_regimes) throw InvalidArgument("fewer paths than regimes");
  cfg.seed = resolve_seed(a.seed, err);
  const FitResult r = fit(stats, cfg);
  if (!r.converged) err << "warning: EM stopped at max_iter without meeting tol\n";
  for (const auto& f : r.flags) err << "warning: " << f << "\n";
  const auto report = io::make_fit_report(r, stats, cfg);
  if (!report.se_error.empty()) err << "warning: standard errors unavailable: " << report.se_error << "\n";
  emit_json(a.out, io::fit_report_to_json(report), out);
  return kOk;
}

struct SelectArgs {
  std::string paths;
  int max_regimes = 3;
  double tol = 1e-5;
  int max_iter = 2000;
  std::optional<std::uint64_t> seed;
  int restarts = 1;
  int states = 0;
  std::string out = "-";
};

int cmd_select(const SelectArgs& a, std::ostream& out, std::ostream& err) {
  if (a.max_regimes < 1) throw InvalidArgument("--max-regimes must be >= 1");
  const auto stats = load_stats(a.paths, a.states);
  FitConfig cfg;
  cfg.tol = a.tol;
  cfg.max_iter = a.max_iter;
  cfg.restarts = a.restarts;
  const auto errs = config_violations(cfg);
  if (!errs.empty()) throw InvalidArgument("invalid select options: " + errs.front());
  cfg.seed = resolve_seed(a.seed, err);
  std::vector<int> range;
  for (int m = 1; m <= a.max_regimes; ++m) range.push_back(m);
  const auto rows = select_model(stats, range, cfg);
  bool any = false;
  for (const auto& r : rows) {
    if (r.ok) any = true;
    else err << "M=" << r.num_regimes << " failed: " << r.error << "\n";
  }
  emit_json(a.out, io::selection_to_json(io::selection_entries(rows)), out);
  if (!any) throw EstimationError("every fit failed");
  return kOk;
}

struct AsymptoticsArgs {
  std::string model;
  double horizon = 0.0;
  std::string out = "-";
};

int cmd_asymptotics(const AsymptoticsArgs& a, std::ostream& out, std::ostream&) {
  const ModelParams model = io::read_model_file(a.model);
  io::AsymptoticsDoc doc;
  doc.horizon = a.horizon;
  doc.report = cramer_rao(model, a.horizon);
  emit_json(a.out, io::asymptotics_to_json(doc, model), out);
  return kOk;
}

struct VerifyArgs {
  std::string config;
  std::string out = "-";
  int threads = -1;
};

int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  const json doc = io::read_json_file(a.config);
  const auto base = std::filesystem::path(a.config).parent_path().string();
  StudyConfig cfg = io::study_config_from_json(doc, base.empty() ? "." : base);
  if (a.threads >= 0) cfg.threads = a.threads;
  const StudyReport report = monte_carlo_study(cfg);
  for (const auto& b : report.blocks) {
    if (b.failed > 0) err << "K=" << b.paths << ": " << b.failed << " replication(s) failed\n";
  }
  emit_json(a.out, io::study_report_to_json(report), out);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Conditional Markov jump processes: simulation, EM estimation and inference", "cmjp"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Simulate sample paths (JSON lines)");
  s->add_option("--model", sim.model, "Model file")->required();
  s->add_option("--paths", sim.paths, "Number of paths K")->required();
  s->add_option("--horizon", sim.horizon, "Observation horizon T")->required();
  s->add_option("--seed", sim.seed, "Random seed");
  s->add_option("--mode", sim.mode, "conditional or mixture")->check(CLI::IsMember({"conditional", "mixture"}));
  s->add_option("--out", sim.out, "Output file ('-' for stdout)");

  FitArgs fa;
  auto* f = app.add_subcommand("fit", "Fit an M-regime model by EM");
  f->add_option("--paths", fa.paths, "Paths file")->required();
  f->add_option("--regimes", fa.regimes, "Number of regimes M");
  f->add_option("--tol", fa.tol, "Convergence tolerance");
  f->add_option("--max-iter", fa.max_iter, "Iteration cap");
  f->add_option("--seed", fa.seed, "Seed for the initial split");
  f->add_option("--restarts", fa.restarts, "Random initialisations");
  f->add_option("--states", fa.states, "Number of states (default: largest label in the data)");
  f->add_option("--out", fa.out, "Output file ('-' for stdout)");

  SelectArgs sa;
  auto* se = app.add_subcommand("select", "Choose the number of regimes by AIC");
  se->add_option("--paths", sa.paths, "Paths file")->required();
  se->add_option("--max-regimes", sa.max_regimes, "Largest M to fit");
  se->add_option("--tol", sa.tol, "Convergence tolerance");
  se->add_option("--max-iter", sa.max_iter, "Iteration cap");
  se->add_option("--seed", sa.seed, "Seed for the initial splits");
  se->add_option("--restarts", sa.restarts, "Random initialisations per M");
  se->add_option("--states", sa.states, "Number of states (default: largest label in the data)");
  se->add_option("--out", sa.out, "Output file ('-' for stdout)");

  AsymptoticsArgs aa;
  auto* as = app.add_subcommand("asymptotics", "Expected information, asymptotic covariance, Cramer-Rao bound");
  as->add_option("--model", aa.model, "Model file")->required();
  as->add_option("--horizon", aa.horizon, "Observation horizon T")->required();
  as->add_option("--out", aa.out, "Output file ('-' for stdout)");

  VerifyArgs va;
  auto* v = app.add_subcommand("verify", "Run a Monte Carlo study");
  v->add_option("--config", va.config, "Study configuration")->required();
  v->add_option("--out", va.out, "Output file ('-' for stdout)");
  v->add_option("--threads", va.threads, "Worker threads (0 = all cores)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*s) return cmd_simulate(sim, out, err);
    if (*f) return cmd_fit(fa, out, err);
    if (*se) return cmd_select(sa, out, err);
    if (*as) return cmd_asymptotics(aa, out, err);
    if (*v) return cmd_verify(va, out, err);
  } catch (const NumericError& e) {
    err << "error: " << e.what() << "\n";
    return kNumericError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kUsage;
}

}  // namespace cmjp::cli
