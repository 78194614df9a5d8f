#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <thread>

#include "cmjp/errors.hpp"
#include "cmjp/inference.hpp"

namespace cmjp {

std::vector<std::string> study_config_violations(const StudyConfig& config) {
  std::vector<std::string> errs;
  for (const auto& v : model_violations(config.truth)) errs.push_back("model: " + v);
  if (config.replications < 2) errs.push_back("replications must be >= 2");
  if (config.path_counts.empty()) errs.push_back("paths list must not be empty");
  for (std::size_t i = 0; i < config.path_counts.size(); ++i) {
    if (config.path_counts[i] < std::max(1, config.truth.num_regimes)) {
      errs.push_back("paths[" + std::to_string(i) + "] must be >= the number of regimes");
    }
  }
  if (!(config.horizon > 0.0) || !std::isfinite(config.horizon)) errs.push_back("horizon must be a positive number");
  if (!(config.tol > 0.0)) errs.push_back("tol must be > 0");
  if (config.max_iter < 1) errs.push_back("max_iter must be >= 1");
  if (config.restarts < 1) errs.push_back("restarts must be >= 1");
  if (config.threads < 0) errs.push_back("threads must be >= 0");
  return errs;
}

std::vector<int> nearest_labelling(const ModelParams& fit, const ModelParams& truth) {
  if (fit.num_regimes != truth.num_regimes || fit.num_states != truth.num_states) {
    throw InvalidArgument("nearest_labelling: model shapes differ");
  }
  std::vector<int> perm(static_cast<std::size_t>(fit.num_regimes));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (int j = 0; j < fit.num_regimes; ++j) {
      cost += (fit.rates[static_cast<std::size_t>(perm[static_cast<std::size_t>(j)])] -
               truth.rates[static_cast<std::size_t>(j)])
                  .cwiseAbs()
                  .sum();
    }
    if (cost < best_cost) {
      best_cost = cost;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

namespace {

struct Replication {
  bool ok = false;
  std::string error;
  Vector estimate;
  Vector se;  // NaN where unavailable
};

Replication run_replication(const StudyConfig& cfg, int paths, int rep) {
  Replication out;
  const std::uint64_t rep_seed =
      derive_seed(derive_seed(cfg.seed, static_cast<std::uint64_t>(paths)), static_cast<std::uint64_t>(rep));
  try {
    const auto sims = simulate_paths(cfg.truth, paths, cfg.horizon, derive_seed(rep_seed, 1), cfg.mode);
    std::vector<SufficientStats> stats;
    stats.reserve(sims.size());
    for (const auto& s : sims) stats.push_back(path_stats(s.path, cfg.truth.num_states));

    FitConfig fc;
    fc.num_regimes = cfg.truth.num_regimes;
    fc.tol = cfg.tol;
    fc.max_iter = cfg.max_iter;
    fc.restarts = cfg.restarts;
    fc.seed = derive_seed(rep_seed, 2);
    const FitResult fr = fit(stats, fc);
    const ModelParams theta = permute_regimes(fr.theta_hat, nearest_labelling(fr.theta_hat, cfg.truth));
    out.estimate = to_vector(theta);
    out.se = Vector::Constant(out.estimate.size(), std::numeric_limits<double>::quiet_NaN());
    try {
      const auto ses = standard_errors(observed_fisher(stats, theta));
      for (std::size_t i = 0; i < ses.size(); ++i) out.se[static_cast<Eigen::Index>(i)] = ses[i].se;
    } catch (const NumericError&) {
    }
    out.ok = true;
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

StudyBlock aggregate(const StudyConfig& cfg, int paths, const std::vector<Replication>& reps) {
  StudyBlock b;
  b.paths = paths;
  const ParamLayout layout(cfg.truth.num_states, cfg.truth.num_regimes);
  const Vector truth = to_vector(cfg.truth);
  const int n_par = layout.size();
  for (std::size_t r = 0; r < reps.size(); ++r) {
    if (reps[r].ok) {
      ++b.succeeded;
    } else {
      ++b.failed;
      b.failures.push_back("replication " + std::to_string(r + 1) + ": " + reps[r].error);
    }
  }
  b.estimates.resize(b.succeeded, n_par);
  int row = 0;
  for (const auto& r : reps) {
    if (r.ok) b.estimates.row(row++) = r.estimate.transpose();
  }
  std::vector<double> abs_bias;
  std::vector<double> rmses;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int i = 0; i < n_par; ++i) {
    ParameterSummary s;
    s.name = layout.name(i);
    s.true_value = truth[i];
    if (b.succeeded > 0) {
      const Vector col = b.estimates.col(i);
      const double n = static_cast<double>(b.succeeded);
      s.mean = col.mean();
      s.bias = s.mean - truth[i];
      s.rmse = std::sqrt((col.array() - truth[i]).square().sum() / n);
      s.empirical_se = std::sqrt(std::max(0.0, s.rmse * s.rmse - s.bias * s.bias));
      double se_sum = 0.0;
      for (const auto& r : reps) {
        if (r.ok && std::isfinite(r.se[i])) {
          se_sum += r.se[i];
          ++s.jse_count;
        }
      }
      s.mean_jse = s.jse_count > 0 ? se_sum / s.jse_count : nan;
      const double sd = b.succeeded > 1 ? std::sqrt((col.array() - s.mean).square().sum() / (n - 1.0)) : 0.0;
      if (sd > 0.0) {
        std::vector<double> z(static_cast<std::size_t>(b.succeeded));
        for (int k = 0; k < b.succeeded; ++k) z[static_cast<std::size_t>(k)] = (col[k] - s.mean) / sd;
        const KsResult ks = ks_normal_test(z);
        s.ks_statistic = ks.statistic;
        s.ks_p_value = ks.p_value;
      } else {
        s.ks_statistic = nan;
        s.ks_p_value = nan;
      }
      abs_bias.push_back(std::abs(s.bias));
      rmses.push_back(s.rmse);
    } else {
      s.mean = s.bias = s.rmse = s.empirical_se = s.mean_jse = s.ks_statistic = s.ks_p_value = nan;
    }
    b.parameters.push_back(std::move(s));
  }
  b.median_abs_bias = abs_bias.empty() ? nan : median(abs_bias);
  b.median_rmse = rmses.empty() ? nan : median(rmses);
  return b;
}

}  // namespace

StudyReport monte_carlo_study(const StudyConfig& config) {
  const auto errs = study_config_violations(config);
  if (!errs.empty()) {
    std::string msg = "invalid study configuration:";
    for (const auto& e : errs) msg += "\n  " + e;
    throw InvalidArgument(msg);
  }
  StudyReport report;
  report.replications = config.replications;
  report.horizon = config.horizon;
  report.seed = config.seed;

  int threads = config.threads == 0 ? static_cast<int>(std::thread::hardware_concurrency()) : config.threads;
  threads = std::clamp(threads, 1, config.replications);

  for (int paths : config.path_counts) {
    std::vector<Replication> reps(static_cast<std::size_t>(config.replications));
    std::atomic<int> next{0};
    auto worker = [&] {
      for (int r = next++; r < config.replications; r = next++) {
        reps[static_cast<std::size_t>(r)] = run_replication(config, paths, r);
      }
    };
    if (threads == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }
    report.blocks.push_back(aggregate(config, paths, reps));
  }
  return report;
}

}  // namespace cmjp
