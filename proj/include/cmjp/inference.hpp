#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cmjp/em.hpp"
#include "cmjp/model.hpp"
#include "cmjp/simulate.hpp"

namespace cmjp {

// A symmetric matrix indexed by a subset of the free-parameter layout.
struct ParamMatrix {
  ParamLayout layout{1, 1};
  std::vector<int> retained;  // layout indices, in layout order
  Vector values;              // full free-parameter vector
  Matrix matrix;              // retained x retained
};
using FisherMatrix = ParamMatrix;

// How phi enters the observed information. kConstrained differentiates the
// likelihood with phi[x][M-1] = 1 - sum of the free entries (the exact
// negative Hessian). kUnconstrained treats every phi[x][m] as a free
// coordinate and reports the m < M-1 rows and columns of that Hessian.
enum class PhiParametrization { kConstrained, kUnconstrained };

constexpr double kZeroExclusion = 1e-8;

// Layout indices whose value is at least `threshold` in absolute value.
std::vector<int> retained_parameters(const ModelParams& theta, double threshold = kZeroExclusion);

// Observed information J_p at theta_hat in closed form, summed over paths.
FisherMatrix observed_fisher(std::span<const SufficientStats> stats, const ModelParams& theta_hat,
                             PhiParametrization phi = PhiParametrization::kConstrained);
// Same with an explicit retained set; a retained parameter equal to zero is
// rejected.
FisherMatrix observed_fisher(std::span<const SufficientStats> stats, const ModelParams& theta_hat,
                             const std::vector<int>& retained,
                             PhiParametrization phi = PhiParametrization::kConstrained);

struct ParameterSE {
  std::string name;
  double value = 0.0;
  bool fixed_at_zero = false;
  double se = 0.0;  // NaN when fixed_at_zero
};

// sqrt of diag(J^{-1}). Throws SingularMatrixError (with the condition number)
// when J cannot be inverted.
Vector standard_errors(const Matrix& j);
std::vector<ParameterSE> standard_errors(const FisherMatrix& j);

// Expected complete-data information per path, over the full layout.
// Block diagonal: phi blocks alpha_x / phi_xm (delta_mn - phi_xm), rate
// diagonal alpha' S_m (int_0^T e^{Q_m u} du) e_x / q_xy,m.
ParamMatrix expected_fisher_complete(const ModelParams& model, double horizon);

// Asymptotic covariance of sqrt(K)(theta_hat - theta): phi blocks
// phi_xn / alpha_x (delta_mn - phi_xm), rate diagonal 1 / I_c.
ParamMatrix asymptotic_covariance(const ModelParams& model, double horizon);

struct CramerRaoReport {
  ParamLayout layout{1, 1};
  Matrix ic;
  Matrix ic_inverse;
  Matrix sigma;
  Matrix ip_inverse;             // [Sigma I_c]^{1/2} I_c^{-1}, computed per block
  double phi_min_eigenvalue = 0; // min eigenvalue of ip_inverse - sigma over phi blocks
  double q_max_abs_diff = 0;     // max |ip_inverse - sigma| over the rate block
  bool phi_dominates = false;    // phi_min_eigenvalue >= -1e-9
  bool q_equal = false;          // q_max_abs_diff <= 1e-10
};

CramerRaoReport cramer_rao(const ModelParams& model, double horizon);

struct KsResult {
  double statistic = 0.0;
  double p_value = 0.0;
};

// One-sample Kolmogorov-Smirnov test against N(0, 1).
KsResult ks_normal_test(std::span<const double> samples);
// P(sqrt(n) D > z) under the Kolmogorov limit law.
double kolmogorov_survival(double z);
double normal_cdf(double x);

struct StudyConfig {
  ModelParams truth;
  int replications = 0;
  std::vector<int> path_counts;
  double horizon = 30.0;
  std::uint64_t seed = 0;
  double tol = 1e-5;
  int max_iter = 2000;
  int restarts = 1;
  int threads = 1;  // 0 = hardware concurrency
  SimulationMode mode = SimulationMode::kConditional;
};

std::vector<std::string> study_config_violations(const StudyConfig& config);

struct ParameterSummary {
  std::string name;
  double true_value = 0.0;
  double mean = 0.0;
  double bias = 0.0;
  double rmse = 0.0;
  double empirical_se = 0.0;  // sqrt(RMSE^2 - Bias^2)
  double mean_jse = 0.0;      // mean observed-information SE over replications that produced one
  int jse_count = 0;
  double ks_statistic = 0.0;
  double ks_p_value = 0.0;
};

struct StudyBlock {
  int paths = 0;
  int succeeded = 0;
  int failed = 0;
  std::vector<std::string> failures;  // "replication 3: message"
  std::vector<ParameterSummary> parameters;
  Matrix estimates;                   // succeeded x |theta|, canonical labels
  double median_abs_bias = 0.0;
  double median_rmse = 0.0;
};

struct StudyReport {
  int replications = 0;
  double horizon = 0.0;
  std::uint64_t seed = 0;
  std::vector<StudyBlock> blocks;
};

// Regime relabelling of `fit` (already sorted by exit rate) that minimises the
// total absolute deviation of the rates from `truth`. Identity wins ties.
std::vector<int> nearest_labelling(const ModelParams& fit, const ModelParams& truth);

StudyReport monte_carlo_study(const StudyConfig& config);

// Median of a non-empty list.
double median(std::vector<double> v);

}  // namespace cmjp
