#include "cmjp/likelihood.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "cmjp/errors.hpp"

namespace cmjp {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_posterior(const Vector& posterior, const ModelParams& model) {
  if (posterior.size() != model.num_regimes) {
    throw InvalidArgument("posterior length does not match the regime count");
  }
}

void check_state(int state, const ModelParams& model) {
  if (state < 0 || state >= model.num_states) throw InvalidArgument("state out of range");
}

}  // namespace

double log_sum_exp(const Vector& v) {
  if (v.size() == 0) return kNegInf;
  const double mx = v.maxCoeff();
  if (mx == kNegInf) return kNegInf;
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += std::exp(v[i] - mx);
  return mx + std::log(s);
}

Vector regime_logliks(const SufficientStats& stats, const ModelParams& model) {
  const int p = model.num_states;
  if (stats.num_states() != p) throw InvalidArgument("regime_logliks: state count mismatch");
  Vector out(model.num_regimes);
  for (int m = 0; m < model.num_regimes; ++m) {
    const Matrix& q = model.rates[static_cast<std::size_t>(m)];
    double acc = 0.0;
    for (int x = 0; x < p && acc != kNegInf; ++x) {
      for (int y = 0; y < p; ++y) {
        if (y == x) continue;
        const double n = stats.counts(x, y);
        if (n > 0.0) {
          if (q(x, y) <= 0.0) {
            acc = kNegInf;
            break;
          }
          acc += n * std::log(q(x, y));
        }
        acc -= q(x, y) * stats.occupation[x];
      }
    }
    out[m] = acc;
  }
  return out;
}

Vector posterior_from_logliks(const Eigen::Ref<const Vector>& prior, const Vector& logliks) {
  const Eigen::Index m_count = logliks.size();
  double mx = kNegInf;
  for (Eigen::Index m = 0; m < m_count; ++m) {
    if (prior[m] > 0.0 && logliks[m] > mx) mx = logliks[m];
  }
  if (mx == kNegInf) throw DegeneratePosteriorError("every regime assigns zero likelihood to the path");
  Vector w(m_count);
  double total = 0.0;
  for (Eigen::Index m = 0; m < m_count; ++m) {
    w[m] = (prior[m] > 0.0 && logliks[m] != kNegInf) ? prior[m] * std::exp(logliks[m] - mx) : 0.0;
    total += w[m];
  }
  return w / total;
}

Vector switching_posterior(const SufficientStats& prefix, int state, double residual, const ModelParams& model) {
  check_state(state, model);
  if (!(residual >= 0.0) || !std::isfinite(residual)) {
    throw InvalidArgument("switching_posterior: residual time must be finite and nonnegative");
  }
  Vector ll = regime_logliks(prefix, model);
  for (int m = 0; m < model.num_regimes; ++m) ll[m] -= model.exit_rate(state, m) * residual;
  return posterior_from_logliks(model.phi.row(prefix.initial_state).transpose(), ll);
}

Vector posterior_weights(const SufficientStats& stats, const ModelParams& model) {
  return posterior_from_logliks(model.phi.row(stats.initial_state).transpose(), regime_logliks(stats, model));
}

double observed_loglik(std::span<const SufficientStats> stats, const ModelParams& model) {
  if (stats.empty()) throw InvalidArgument("observed_loglik: no paths");
  double total = 0.0;
  for (const auto& s : stats) {
    Vector joint = regime_logliks(s, model);
    for (int m = 0; m < model.num_regimes; ++m) {
      const double ph = model.phi(s.initial_state, m);
      joint[m] = ph > 0.0 ? joint[m] + std::log(ph) : kNegInf;
    }
    const double lse = log_sum_exp(joint);
    const double a = model.alpha[s.initial_state];
    if (lse == kNegInf || a <= 0.0) {
      throw DegeneratePosteriorError("path " + std::to_string(s.id) + " has zero likelihood under every regime");
    }
    total += std::log(a) + lse;
  }
  return total;
}

Vector alpha_mle(std::span<const SufficientStats> stats) {
  if (stats.empty()) throw InvalidArgument("alpha_mle: no paths");
  Vector a = Vector::Zero(stats[0].num_states());
  for (const auto& s : stats) a += s.initial;
  return a / static_cast<double>(stats.size());
}

Vector observed_score(std::span<const SufficientStats> stats, const ModelParams& model) {
  const ParamLayout layout(model.num_states, model.num_regimes);
  const int last = model.num_regimes - 1;
  Vector g = Vector::Zero(layout.size());
  for (const auto& s : stats) {
    const Vector post = posterior_weights(s, model);
    for (int i = 0; i < layout.size(); ++i) {
      const auto& e = layout[i];
      if (e.kind == ParamLayout::Kind::kPhi) {
        if (e.x != s.initial_state) continue;
        g[i] += post[e.m] / model.phi(e.x, e.m) - post[last] / model.phi(e.x, last);
      } else {
        const double q = model.rates[static_cast<std::size_t>(e.m)](e.x, e.y);
        g[i] += post[e.m] * (s.counts(e.x, e.y) / q - s.occupation[e.x]);
      }
    }
  }
  return g;
}

Vector conditional_transition(const Vector& posterior, int state, double dt, const ModelParams& model) {
  check_posterior(posterior, model);
  check_state(state, model);
  Vector out = Vector::Zero(model.num_states);
  for (int m = 0; m < model.num_regimes; ++m) {
    if (posterior[m] == 0.0) continue;
    out += posterior[m] * mat_exp(model.rates[static_cast<std::size_t>(m)], dt).row(state).transpose();
  }
  return out;
}

double holding_survival(const Vector& posterior, int state, double du, const ModelParams& model) {
  check_posterior(posterior, model);
  check_state(state, model);
  if (!(du >= 0.0)) throw InvalidArgument("holding_survival: duration must be nonnegative");
  double s = 0.0;
  for (int m = 0; m < model.num_regimes; ++m) s += posterior[m] * std::exp(-model.exit_rate(state, m) * du);
  return s;
}

double joint_jump(const Vector& posterior, int state, double du, int target, const ModelParams& model) {
  check_posterior(posterior, model);
  check_state(state, model);
  check_state(target, model);
  if (target == state) throw InvalidArgument("joint_jump: target state must differ from the current state");
  if (!(du >= 0.0)) throw InvalidArgument("joint_jump: duration must be nonnegative");
  double s = 0.0;
  for (int m = 0; m < model.num_regimes; ++m) {
    const double exit = model.exit_rate(state, m);
    if (exit <= 0.0) continue;
    const double jump_prob = std::isinf(du) ? 1.0 : -std::expm1(-exit * du);
    s += posterior[m] * jump_prob * model.rates[static_cast<std::size_t>(m)](state, target) / exit;
  }
  return s;
}

}  // namespace cmjp
