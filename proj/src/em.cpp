#include "cmjp/em.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cmjp/errors.hpp"
#include "cmjp/likelihood.hpp"

namespace cmjp {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void fisher_yates(std::vector<int>& v, RngStream& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(v[i - 1], v[j]);
  }
}

Matrix markov_mle_subset(std::span<const SufficientStats> stats, std::span<const int> subset, Vector* occupation) {
  const int p = stats[0].num_states();
  Matrix counts = Matrix::Zero(p, p);
  Vector occ = Vector::Zero(p);
  for (int k : subset) {
    counts += stats[static_cast<std::size_t>(k)].counts;
    occ += stats[static_cast<std::size_t>(k)].occupation;
  }
  Matrix q = Matrix::Zero(p, p);
  for (int x = 0; x < p; ++x) {
    if (occ[x] <= 0.0) continue;
    double exit = 0.0;
    for (int y = 0; y < p; ++y) {
      if (y == x) continue;
      q(x, y) = counts(x, y) / occ[x];
      exit += q(x, y);
    }
    q(x, x) = -exit;
  }
  if (occupation) *occupation = occ;
  return q;
}

double param_distance(const ModelParams& a, const ModelParams& b) {
  return (to_vector(a) - to_vector(b)).norm();
}

}  // namespace

std::vector<std::string> config_violations(const FitConfig& config) {
  std::vector<std::string> errs;
  if (config.num_regimes < 1) errs.push_back("regimes must be >= 1");
  if (!(config.tol > 0.0)) errs.push_back("tol must be > 0");
  if (config.max_iter < 1) errs.push_back("max_iter must be >= 1");
  if (config.restarts < 1) errs.push_back("restarts must be >= 1");
  return errs;
}

Matrix markov_mle(std::span<const SufficientStats> stats) {
  if (stats.empty()) throw InvalidArgument("markov_mle: no paths");
  std::vector<int> all(stats.size());
  std::iota(all.begin(), all.end(), 0);
  return markov_mle_subset(stats, all, nullptr);
}

ModelParams init_params(std::span<const SufficientStats> stats, int num_regimes, RngStream& rng) {
  const int k_count = static_cast<int>(stats.size());
  if (num_regimes < 1) throw InvalidArgument("init_params: M must be >= 1");
  if (k_count < num_regimes) throw InvalidArgument("init_params: need at least M paths");
  const int p = stats[0].num_states();

  ModelParams theta;
  theta.num_states = p;
  theta.num_regimes = num_regimes;
  theta.alpha = alpha_mle(stats);
  theta.phi = Matrix::Constant(p, num_regimes, 1.0 / num_regimes);

  const Matrix pooled = markov_mle(stats);
  std::vector<int> order(static_cast<std::size_t>(k_count));
  std::iota(order.begin(), order.end(), 0);
  if (num_regimes > 1) fisher_yates(order, rng);

  const int group = k_count / num_regimes;
  for (int m = 0; m < num_regimes; ++m) {
    const int begin = m * group;
    const int end = m + 1 == num_regimes ? k_count : begin + group;
    Vector occ;
    Matrix q = markov_mle_subset(stats, std::span<const int>(order).subspan(static_cast<std::size_t>(begin),
                                                                            static_cast<std::size_t>(end - begin)),
                                 &occ);
    for (int x = 0; x < p; ++x) {
      if (occ[x] <= 0.0) q.row(x) = pooled.row(x);
    }
    theta.rates.push_back(std::move(q));
  }
  return theta;
}

EmEngine::EmEngine(std::span<const SufficientStats> stats) : batch_(stats) {
  if (stats.empty()) throw InvalidArgument("EM needs at least one path");
  ids_.reserve(stats.size());
  start_counts_ = Vector::Zero(stats[0].num_states());
  for (const auto& s : stats) {
    ids_.push_back(s.id);
    start_counts_ += s.initial;
  }
  const Vector alpha = start_counts_ / static_cast<double>(stats.size());
  for (const auto& s : stats) alpha_term_ += std::log(alpha[s.initial_state]);
}

double EmEngine::e_step(const ModelParams& theta, std::vector<double>& weights) const {
  const int k_count = batch_.num_paths();
  const int m_count = theta.num_regimes;
  const auto coef = kernels::regime_coefficients(theta, batch_.feature_stride(), true);
  weights.assign(static_cast<std::size_t>(k_count) * m_count, 0.0);
  kernels::regime_loglik(batch_, coef, m_count, weights);

  double total = alpha_term_;
  for (int k = 0; k < k_count; ++k) {
    double* row = weights.data() + static_cast<std::ptrdiff_t>(k) * m_count;
    const double mx = *std::max_element(row, row + m_count);
    if (mx == kNegInf) {
      throw EstimationError("path " + std::to_string(ids_[static_cast<std::size_t>(k)]) +
                            " has zero likelihood under every regime");
    }
    double s = 0.0;
    for (int m = 0; m < m_count; ++m) {
      row[m] = row[m] == kNegInf ? 0.0 : std::exp(row[m] - mx);
      s += row[m];
    }
    for (int m = 0; m < m_count; ++m) row[m] /= s;
    total += mx + std::log(s);
  }
  return total;
}

ModelParams EmEngine::m_step(const ModelParams& theta, std::span<const double> weights,
                             std::vector<std::string>* flags) const {
  const int p = theta.num_states;
  const int m_count = theta.num_regimes;
  const int stride = batch_.feature_stride();
  std::vector<double> sums(static_cast<std::size_t>(m_count) * stride);
  kernels::weighted_feature_sums(batch_, weights, m_count, sums);

  ModelParams next = theta;
  for (int m = 0; m < m_count; ++m) {
    const double* s = sums.data() + static_cast<std::ptrdiff_t>(m) * stride;
    Matrix& q = next.rates[static_cast<std::size_t>(m)];
    int f = batch_.count_offset();
    for (int x = 0; x < p; ++x) {
      const double occ = s[batch_.occupation_offset() + x];
      double exit = 0.0;
      for (int y = 0; y < p; ++y) {
        if (y == x) continue;
        const double n = s[f++];
        q(x, y) = occ > 0.0 ? n / occ : 0.0;
        exit += q(x, y);
      }
      q(x, x) = -exit;
      if (!(occ > 0.0) && flags) {
        flags->push_back("regime " + std::to_string(m + 1) + " has no occupation time in state " +
                         std::to_string(x + 1) + "; its rates were set to 0");
      }
    }
    for (int x = 0; x < p; ++x) {
      if (start_counts_[x] > 0.0) next.phi(x, m) = s[batch_.initial_offset() + x] / start_counts_[x];
    }
  }
  return next;
}

EmEngine::Step EmEngine::step(const ModelParams& theta) const {
  std::vector<double> w;
  Step st;
  st.loglik = e_step(theta, w);
  st.next = m_step(theta, w, &st.flags);
  return st;
}

ModelParams em_step(std::span<const SufficientStats> stats, const ModelParams& theta) {
  return EmEngine(stats).step(theta).next;
}

double aic(double loglik, int num_states, int num_regimes) {
  return 2.0 * free_parameter_count(num_states, num_regimes) - 2.0 * loglik;
}

std::vector<int> exit_rate_order(const ModelParams& model) {
  std::vector<double> total(static_cast<std::size_t>(model.num_regimes), 0.0);
  for (int m = 0; m < model.num_regimes; ++m) {
    for (int x = 0; x < model.num_states; ++x) total[static_cast<std::size_t>(m)] += model.exit_rate(x, m);
  }
  std::vector<int> order(static_cast<std::size_t>(model.num_regimes));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return total[static_cast<std::size_t>(a)] < total[static_cast<std::size_t>(b)];
  });
  return order;
}

namespace {

FitResult run_em(const EmEngine& engine, ModelParams theta, const FitConfig& config) {
  FitResult r;
  std::vector<double> w;
  for (int it = 0; it < config.max_iter; ++it) {
    std::vector<std::string> flags;
    const double ll = engine.e_step(theta, w);
    r.loglik_trace.push_back(ll);
    ModelParams next = engine.m_step(theta, w, &flags);
    for (auto& f : flags) {
      if (std::find(r.flags.begin(), r.flags.end(), f) == r.flags.end()) r.flags.push_back(std::move(f));
    }
    const double dist = param_distance(next, theta);
    theta = std::move(next);
    r.iterations = it + 1;
    if (dist < config.tol) {
      r.converged = true;
      break;
    }
  }

  const auto order = exit_rate_order(theta);
  theta = permute_regimes(theta, order);
  r.loglik = engine.e_step(theta, w);
  r.loglik_trace.push_back(r.loglik);
  const int k_count = engine.num_paths();
  const int m_count = theta.num_regimes;
  r.posteriors.resize(k_count, m_count);
  for (int k = 0; k < k_count; ++k) {
    for (int m = 0; m < m_count; ++m) r.posteriors(k, m) = w[static_cast<std::size_t>(k) * m_count + m];
  }
  r.aic = aic(r.loglik, theta.num_states, theta.num_regimes);
  r.theta_hat = std::move(theta);
  return r;
}

void check_fit_inputs(std::span<const SufficientStats> stats, const FitConfig& config) {
  const auto errs = config_violations(config);
  if (!errs.empty()) throw InvalidArgument("invalid fit configuration: " + errs.front());
  if (stats.empty()) throw InvalidArgument("fit: no paths");
}

}  // namespace

FitResult fit_from(std::span<const SufficientStats> stats, const ModelParams& start, const FitConfig& config) {
  check_fit_inputs(stats, config);
  const EmEngine engine(stats);
  ModelParams theta = start;
  theta.alpha = alpha_mle(stats);
  return run_em(engine, std::move(theta), config);
}

FitResult fit(std::span<const SufficientStats> stats, const FitConfig& config,
              std::span<const ModelParams> extra_starts) {
  check_fit_inputs(stats, config);
  if (static_cast<int>(stats.size()) < config.num_regimes) {
    throw InvalidArgument("fit: need at least as many paths as regimes");
  }
  const EmEngine engine(stats);
  const Vector alpha = alpha_mle(stats);

  std::optional<FitResult> best;
  std::string last_error;
  const int random_starts = config.num_regimes == 1 ? 1 : config.restarts;
  const int total = random_starts + static_cast<int>(extra_starts.size());
  for (int s = 0; s < total; ++s) {
    ModelParams start;
    if (s < random_starts) {
      RngStream rng(config.seed, static_cast<std::uint64_t>(s));
      start = init_params(stats, config.num_regimes, rng);
    } else {
      start = extra_starts[static_cast<std::size_t>(s - random_starts)];
      start.alpha = alpha;
    }
    try {
      FitResult r = run_em(engine, std::move(start), config);
      r.best_start = s;
      if (!best || r.loglik > best->loglik) best = std::move(r);
    } catch (const EstimationError& e) {
      last_error = e.what();
    }
  }
  if (!best) throw EstimationError("estimation failed from every start: " + last_error);
  return std::move(*best);
}

namespace {

ModelParams split_heaviest_regime(const FitResult& prev, RngStream& rng) {
  const ModelParams& base = prev.theta_hat;
  const int m_count = base.num_regimes;
  int heavy = 0;
  double best_mass = -1.0;
  for (int m = 0; m < m_count; ++m) {
    const double mass = prev.posteriors.col(m).sum();
    if (mass > best_mass) {
      best_mass = mass;
      heavy = m;
    }
  }
  ModelParams out = base;
  out.num_regimes = m_count + 1;
  out.phi.conservativeResize(Eigen::NoChange, m_count + 1);
  for (int x = 0; x < base.num_states; ++x) {
    out.phi(x, m_count) = 0.5 * base.phi(x, heavy);
    out.phi(x, heavy) = 0.5 * base.phi(x, heavy);
  }
  Matrix a = base.rates[static_cast<std::size_t>(heavy)];
  Matrix b = a;
  for (int x = 0; x < base.num_states; ++x) {
    double ea = 0.0;
    double eb = 0.0;
    for (int y = 0; y < base.num_states; ++y) {
      if (y == x) continue;
      const double jitter = 0.2 * (rng.uniform() - 0.5);
      a(x, y) *= 1.0 + jitter;
      b(x, y) *= 1.0 - jitter;
      ea += a(x, y);
      eb += b(x, y);
    }
    a(x, x) = -ea;
    b(x, x) = -eb;
  }
  out.rates[static_cast<std::size_t>(heavy)] = a;
  out.rates.push_back(b);
  return out;
}

}  // namespace

std::vector<SelectionRow> select_model(std::span<const SufficientStats> stats, std::span<const int> regime_counts,
                                       const FitConfig& config) {
  std::vector<int> counts(regime_counts.begin(), regime_counts.end());
  std::sort(counts.begin(), counts.end());
  counts.erase(std::unique(counts.begin(), counts.end()), counts.end());

  std::vector<SelectionRow> rows;
  const FitResult* previous = nullptr;
  for (int m : counts) {
    SelectionRow row;
    row.num_regimes = m;
    FitConfig cfg = config;
    cfg.num_regimes = m;
    try {
      std::vector<ModelParams> extra;
      if (previous && previous->theta_hat.num_regimes == m - 1) {
        RngStream rng(config.seed, 0x5eed0000ULL + static_cast<std::uint64_t>(m));
        extra.push_back(split_heaviest_regime(*previous, rng));
      }
      row.fit = fit(stats, cfg, extra);
      row.ok = true;
      row.loglik = row.fit.loglik;
      row.aic = row.fit.aic;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
    previous = rows.back().ok ? &rows.back().fit : nullptr;
  }
  int best = -1;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].ok && (best < 0 || rows[i].aic < rows[static_cast<std::size_t>(best)].aic)) best = static_cast<int>(i);
  }
  if (best >= 0) rows[static_cast<std::size_t>(best)].selected = true;
  return rows;
}

}  // namespace cmjp
