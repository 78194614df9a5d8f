#pragma once

// Independent reference computations used only by the tests: Gauss-Legendre
// quadrature, finite differences, random instances and a generic Louis-formula
// information matrix.

#include <cmath>
#include <functional>
#include <type_traits>
#include <random>
#include <vector>

#include "cmjp/likelihood.hpp"
#include "cmjp/matcore.hpp"
#include "cmjp/model.hpp"
#include "cmjp/simulate.hpp"

namespace oracle {

using cmjp::Matrix;
using cmjp::ModelParams;
using cmjp::SufficientStats;
using cmjp::Vector;

// Composite 5-point Gauss-Legendre rule on [a, b] with `panels` panels.
template <class F>
auto integrate(F&& f, double a, double b, int panels) {
  using R = std::decay_t<decltype(f(a))>;
  static const double node[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                 0.9061798459386640};
  static const double weight[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                   0.4786286704993665, 0.2369268850561891};
  const double h = (b - a) / panels;
  R total = f(a) * 0.0;
  for (int i = 0; i < panels; ++i) {
    const double mid = a + (i + 0.5) * h;
    for (int j = 0; j < 5; ++j) total += f(mid + 0.5 * h * node[j]) * (0.5 * h * weight[j]);
  }
  return total;
}

inline Matrix random_generator(int p, std::mt19937_64& gen, double lo = 0.1, double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix q = Matrix::Zero(p, p);
  for (int x = 0; x < p; ++x) {
    double exit = 0.0;
    for (int y = 0; y < p; ++y) {
      if (y == x) continue;
      q(x, y) = u(gen);
      exit += q(x, y);
    }
    q(x, x) = -exit;
  }
  return q;
}

inline Vector random_simplex(int n, std::mt19937_64& gen, double floor = 0.05) {
  std::gamma_distribution<double> g(2.0, 1.0);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = g(gen);
  v /= v.sum();
  v = (v.array() * (1.0 - floor * n) + floor).matrix();
  v /= v.sum();
  return v;
}

inline ModelParams random_model(int p, int m, std::mt19937_64& gen, double lo = 0.1, double hi = 2.0) {
  ModelParams model;
  model.num_states = p;
  model.num_regimes = m;
  model.alpha = random_simplex(p, gen);
  model.phi.resize(p, m);
  for (int x = 0; x < p; ++x) model.phi.row(x) = random_simplex(m, gen).transpose();
  for (int k = 0; k < m; ++k) model.rates.push_back(random_generator(p, gen, lo, hi));
  return model;
}

inline std::vector<SufficientStats> simulate_stats(const ModelParams& model, int count, double horizon,
                                                   std::uint64_t seed,
                                                   cmjp::SimulationMode mode = cmjp::SimulationMode::kConditional) {
  std::vector<SufficientStats> out;
  for (const auto& s : cmjp::simulate_paths(model, count, horizon, seed, mode)) {
    out.push_back(cmjp::path_stats(s.path, model.num_states));
  }
  return out;
}

// Observed log-likelihood as a function of the free parameter vector.
inline std::function<double(const Vector&)> loglik_of(const std::vector<SufficientStats>& stats,
                                                      const ModelParams& at) {
  return [&stats, p = at.num_states, m = at.num_regimes, alpha = at.alpha](const Vector& v) {
    return cmjp::observed_loglik(stats, cmjp::from_vector(v, p, m, alpha));
  };
}

// Observed log-likelihood with every phi[x][m] an independent coordinate
// (no normalisation): sum_k log alpha + log sum_m phi_m exp(ll_m). The
// coordinates are the usual layout with phi[x][M-1] held at its value.
inline double unconstrained_loglik(const std::vector<SufficientStats>& stats, const ModelParams& at,
                                   const Vector& v) {
  ModelParams m = cmjp::from_vector(v, at.num_states, at.num_regimes, at.alpha);
  for (int x = 0; x < at.num_states; ++x) m.phi(x, at.num_regimes - 1) = at.phi(x, at.num_regimes - 1);
  double total = 0.0;
  for (const auto& s : stats) {
    const Vector ll = cmjp::regime_logliks(s, m);
    Vector terms(at.num_regimes);
    for (int r = 0; r < at.num_regimes; ++r) terms[r] = std::log(m.phi(s.initial_state, r)) + ll[r];
    total += std::log(m.alpha[s.initial_state]) + cmjp::log_sum_exp(terms);
  }
  return total;
}

inline Vector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& x, double rel_step) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = rel_step * std::max(1.0, std::abs(x[i]));
    Vector a = x, b = x;
    a[i] += h;
    b[i] -= h;
    g[i] = (f(a) - f(b)) / (2.0 * h);
  }
  return g;
}

// Central second differences with step rel_step * max(1, |x_i|).
inline Matrix fd_hessian(const std::function<double(const Vector&)>& f, const Vector& x, double rel_step) {
  const Eigen::Index n = x.size();
  Matrix h(n, n);
  std::vector<double> step(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) step[static_cast<std::size_t>(i)] = rel_step * std::max(1.0, std::abs(x[i]));
  const double f0 = f(x);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double hi = step[static_cast<std::size_t>(i)];
    Vector a = x, b = x;
    a[i] += hi;
    b[i] -= hi;
    h(i, i) = (f(a) - 2.0 * f0 + f(b)) / (hi * hi);
    for (Eigen::Index j = 0; j < i; ++j) {
      const double hj = step[static_cast<std::size_t>(j)];
      Vector pp = x, pm = x, mp = x, mm = x;
      pp[i] += hi; pp[j] += hj;
      pm[i] += hi; pm[j] -= hj;
      mp[i] -= hi; mp[j] += hj;
      mm[i] -= hi; mm[j] -= hj;
      h(i, j) = h(j, i) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * hi * hj);
    }
  }
  return h;
}

// Louis' identity written out for the mixture: per path,
// -H = -sum_n w_n (D2 g_n + Dg_n Dg_n') + (sum_n w_n Dg_n)(sum_n w_n Dg_n)',
// with g_n = log phi_{x0,n} + complete-data log-likelihood of regime n and
// phi[x][M-1] = 1 - sum of the free entries. Derivatives of g_n are taken by
// central differences of the complete-data log-likelihood, so no closed form
// from the library is reused.
inline Matrix louis_information(const std::vector<SufficientStats>& stats, const ModelParams& at,
                                double rel_step = 1e-5) {
  const int m_count = at.num_regimes;
  const Vector theta = cmjp::to_vector(at);
  const Eigen::Index n = theta.size();
  Matrix info = Matrix::Zero(n, n);
  for (const auto& s : stats) {
    std::vector<std::function<double(const Vector&)>> g;
    for (int r = 0; r < m_count; ++r) {
      g.push_back([&s, &at, r](const Vector& v) {
        const ModelParams m = cmjp::from_vector(v, at.num_states, at.num_regimes, at.alpha);
        return std::log(m.phi(s.initial_state, r)) + cmjp::regime_logliks(s, m)[r];
      });
    }
    const Vector w = cmjp::posterior_weights(s, at);
    Vector mean = Vector::Zero(n);
    Matrix second = Matrix::Zero(n, n);
    for (int r = 0; r < m_count; ++r) {
      if (w[r] == 0.0) continue;
      const Vector dg = fd_gradient(g[static_cast<std::size_t>(r)], theta, rel_step);
      const Matrix d2g = fd_hessian(g[static_cast<std::size_t>(r)], theta, 1e-4);
      mean += w[r] * dg;
      second += w[r] * (d2g + dg * dg.transpose());
    }
    info += -second + mean * mean.transpose();
  }
  return info;
}

// Largest entrywise relative error, with entries below floor * max|ref|
// compared against that floor.
inline double max_rel_error(const Matrix& got, const Matrix& ref, double floor) {
  const double scale = std::max(ref.cwiseAbs().maxCoeff(), 1e-300);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < ref.rows(); ++i) {
    for (Eigen::Index j = 0; j < ref.cols(); ++j) {
      const double denom = std::max(std::abs(ref(i, j)), floor * scale);
      worst = std::max(worst, std::abs(got(i, j) - ref(i, j)) / denom);
    }
  }
  return worst;
}

// Probability of a path being in each state at time t under a plain Markov
// chain started from alpha: alpha' e^{Qt}.
inline Vector markov_marginal(const Vector& alpha, const Matrix& q, double t) {
  return (alpha.transpose() * cmjp::mat_exp(q, t)).transpose();
}

}  // namespace oracle
