#pragma once

#include <span>

#include "cmjp/model.hpp"

namespace cmjp {

// log f(path | regime m) without the alpha factor, one entry per regime:
//   sum_x sum_{y != x} N_xy log q_xy,m - q_xy,m T_x,  with 0 log 0 = 0.
// A regime that cannot produce an observed jump gets -inf.
Vector regime_logliks(const SufficientStats& stats, const ModelParams& model);

// Normalises prior[m] * exp(logliks[m]) in log space. Throws
// DegeneratePosteriorError when every regime has zero weight.
Vector posterior_from_logliks(const Eigen::Ref<const Vector>& prior, const Vector& logliks);

// Regime law given the history: completed sojourns in `prefix`, currently in
// `state` for `residual` time units. Prior is phi[x_0, .].
Vector switching_posterior(const SufficientStats& prefix, int state, double residual, const ModelParams& model);

// E(Phi_k = m | X^k) for a fully observed, censored path.
Vector posterior_weights(const SufficientStats& stats, const ModelParams& model);

// Observed-data log-likelihood including the alpha term. Throws
// DegeneratePosteriorError naming the first path with zero likelihood.
double observed_loglik(std::span<const SufficientStats> stats, const ModelParams& model);

// alpha_x = (1/K) sum_k B_x^k.
Vector alpha_mle(std::span<const SufficientStats> stats);

// Gradient of observed_loglik over the free-parameter layout, written as the
// posterior-weighted complete-data score. phi[x][M-1] is the derived
// complement, so each phi score is B_x (Phi_m / phi_m - Phi_M / phi_M).
Vector observed_score(std::span<const SufficientStats> stats, const ModelParams& model);

// P(X(t + dt) = . | X(t) = x, history) = sum_m posterior[m] e^{Q_m dt}[x, .].
Vector conditional_transition(const Vector& posterior, int state, double dt, const ModelParams& model);

// P(no jump within du | X(t) = x, history).
double holding_survival(const Vector& posterior, int state, double du, const ModelParams& model);

// P(first jump within du and lands in y | X(t) = x, history).
double joint_jump(const Vector& posterior, int state, double du, int target, const ModelParams& model);

// log(sum_i exp(v_i)), -inf for an all -inf input.
double log_sum_exp(const Vector& v);

}  // namespace cmjp
