#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cmjp/kernels.hpp"
#include "cmjp/model.hpp"
#include "cmjp/rng.hpp"

namespace cmjp {

struct FitConfig {
  int num_regimes = 1;
  double tol = 1e-5;    // Euclidean distance between successive parameter vectors
  int max_iter = 2000;
  std::uint64_t seed = 0;
  int restarts = 1;     // random initialisations; the best final log-likelihood wins
};

struct FitResult {
  ModelParams theta_hat;
  std::vector<double> loglik_trace;  // observed log-likelihood at theta^0, theta^1, ...
  int iterations = 0;
  bool converged = false;
  Matrix posteriors;                 // K x M at theta_hat
  double loglik = 0.0;
  double aic = 0.0;
  int best_start = 0;                // which start produced theta_hat
  std::vector<std::string> flags;    // e.g. rates zeroed because a regime had no occupation time
};

// Validates a FitConfig, returning every problem found.
std::vector<std::string> config_violations(const FitConfig& config);

// Random split of the paths into M groups of floor(K/M) (the last group takes
// the remainder); each group's Markov MLE seeds one regime. phi rows start
// uniform and alpha is the empirical initial law. A state never occupied in a
// group borrows the pooled Markov MLE row.
ModelParams init_params(std::span<const SufficientStats> stats, int num_regimes, RngStream& rng);

// Closed-form Markov MLE q_xy = sum N_xy / sum T_x (zero where T_x sums to 0).
Matrix markov_mle(std::span<const SufficientStats> stats);

// One EM update. alpha is carried over unchanged.
ModelParams em_step(std::span<const SufficientStats> stats, const ModelParams& theta);

// Batched EM state over a fixed set of paths. The E-step and M-step go
// through the dispatched kernels.
class EmEngine {
 public:
  explicit EmEngine(std::span<const SufficientStats> stats);

  struct Step {
    ModelParams next;
    double loglik = 0.0;  // observed log-likelihood at the input theta
    std::vector<std::string> flags;
  };

  // Posterior weights (K x M, row-major) and log-likelihood at theta.
  double e_step(const ModelParams& theta, std::vector<double>& weights) const;
  ModelParams m_step(const ModelParams& theta, std::span<const double> weights,
                     std::vector<std::string>* flags = nullptr) const;
  Step step(const ModelParams& theta) const;

  int num_paths() const { return batch_.num_paths(); }

 private:
  kernels::PathBatch batch_;
  std::vector<std::int64_t> ids_;
  Vector start_counts_;
  double alpha_term_ = 0.0;  // sum_k log alpha_hat(x0_k)
};

// Runs EM from each random start (and every entry of extra_starts) and keeps
// the best final log-likelihood. Regimes of the result are ordered by total
// exit rate, ascending.
FitResult fit(std::span<const SufficientStats> stats, const FitConfig& config,
              std::span<const ModelParams> extra_starts = {});

// EM from one given starting point.
FitResult fit_from(std::span<const SufficientStats> stats, const ModelParams& start, const FitConfig& config);

// AIC = 2 |theta| - 2 loglik with |theta| = p(M-1) + M p(p-1).
double aic(double loglik, int num_states, int num_regimes);

// Regime order by total exit rate, ascending (stable).
std::vector<int> exit_rate_order(const ModelParams& model);

struct SelectionRow {
  int num_regimes = 0;
  bool ok = false;
  double loglik = 0.0;
  double aic = 0.0;
  bool selected = false;
  std::string error;
  FitResult fit;
};

// Fits each M in regime_counts (ascending). Besides the random starts, every
// M > 1 fit is also started from the previous fit with its heaviest regime
// split in two, so the nested family is searched from its embedded optimum.
std::vector<SelectionRow> select_model(std::span<const SufficientStats> stats,
                                       std::span<const int> regime_counts, const FitConfig& config);

}  // namespace cmjp
