#include "cmjp/simulate.hpp"

#include <cmath>

#include "cmjp/errors.hpp"
#include "cmjp/likelihood.hpp"

namespace cmjp {
namespace {

struct JumpTables {
  std::vector<Matrix> chains;  // embedded chain per regime
  Matrix exit;                 // p x M exit rates
};

JumpTables make_tables(const ModelParams& model) {
  JumpTables t;
  t.exit.resize(model.num_states, model.num_regimes);
  for (int m = 0; m < model.num_regimes; ++m) {
    t.chains.push_back(embedded_chain(model.rates[static_cast<std::size_t>(m)]));
    for (int x = 0; x < model.num_states; ++x) t.exit(x, m) = model.exit_rate(x, m);
  }
  return t;
}

std::span<const double> row_span(const Matrix& rowmajor_source, std::vector<double>& buf, int row) {
  buf.resize(static_cast<std::size_t>(rowmajor_source.cols()));
  for (Eigen::Index j = 0; j < rowmajor_source.cols(); ++j) buf[static_cast<std::size_t>(j)] = rowmajor_source(row, j);
  return buf;
}

void check_inputs(const ModelParams& model, double horizon) {
  validate_model(model);
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw InvalidArgument("simulation horizon must be positive and finite");
  }
}

}  // namespace

int sample_categorical(std::span<const double> probs, double u) {
  if (probs.empty()) throw InvalidArgument("sample_categorical: empty probability vector");
  if (!(u >= 0.0 && u < 1.0)) throw InvalidArgument("sample_categorical: u must lie in [0, 1)");
  double total = 0.0;
  for (double v : probs) total += v;
  if (std::abs(total - 1.0) > 1e-9) throw InvalidArgument("sample_categorical: probabilities do not sum to 1");
  double cum = 0.0;
  int last_positive = 0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (probs[k] > 0.0) last_positive = static_cast<int>(k);
    cum += probs[k];
    if (u < cum) return static_cast<int>(k);
  }
  // Rounding left u above the final partial sum.
  return last_positive;
}

SimulatedPath simulate_conditional(const ModelParams& model, double horizon, RngStream& rng) {
  check_inputs(model, horizon);
  const JumpTables tables = make_tables(model);
  const int m_count = model.num_regimes;
  std::vector<double> buf;

  SimulatedPath out;
  out.mode = SimulationMode::kConditional;
  out.path.horizon = horizon;

  const Vector& alpha = model.alpha;
  int x = sample_categorical(std::span<const double>(alpha.data(), static_cast<std::size_t>(alpha.size())), rng.uniform());
  const int x0 = x;
  double t = 0.0;
  out.path.times.push_back(0.0);
  out.path.states.push_back(x);

  // Log-likelihood of the realised prefix under each regime (alpha omitted,
  // it cancels); the censored tail term is zero at an epoch.
  Vector prefix_ll = Vector::Zero(m_count);
  const Vector prior = model.phi.row(x0).transpose();

  while (true) {
    const double w = rng.uniform();
    const double v = rng.uniform_pos();
    const double u = rng.uniform();

    int regime = 0;
    if (m_count > 1) {
      const Vector post = posterior_from_logliks(prior, prefix_ll);
      regime = sample_categorical(std::span<const double>(post.data(), static_cast<std::size_t>(m_count)), w);
    }
    out.regimes.push_back(regime);

    const double rate = tables.exit(x, regime);
    if (rate <= 0.0) break;
    const double t_next = t - std::log(v) / rate;
    if (t_next > horizon) break;
    const int y = sample_categorical(row_span(tables.chains[static_cast<std::size_t>(regime)], buf, x), u);

    const double sojourn = t_next - t;
    for (int m = 0; m < m_count; ++m) {
      const double q = model.rates[static_cast<std::size_t>(m)](x, y);
      prefix_ll[m] += (q > 0.0 ? std::log(q) : -INFINITY) - tables.exit(x, m) * sojourn;
    }
    x = y;
    t = t_next;
    out.path.times.push_back(t);
    out.path.states.push_back(x);
  }
  return out;
}

SimulatedPath simulate_mixture(const ModelParams& model, double horizon, RngStream& rng) {
  check_inputs(model, horizon);
  const JumpTables tables = make_tables(model);
  std::vector<double> buf;

  SimulatedPath out;
  out.mode = SimulationMode::kMixture;
  out.path.horizon = horizon;

  const Vector& alpha = model.alpha;
  int x = sample_categorical(std::span<const double>(alpha.data(), static_cast<std::size_t>(alpha.size())), rng.uniform());
  const int regime = sample_categorical(row_span(model.phi, buf, x), rng.uniform());
  out.regimes.push_back(regime);
  double t = 0.0;
  out.path.times.push_back(0.0);
  out.path.states.push_back(x);

  while (true) {
    const double v = rng.uniform_pos();
    const double u = rng.uniform();
    const double rate = tables.exit(x, regime);
    if (rate <= 0.0) break;
    const double t_next = t - std::log(v) / rate;
    if (t_next > horizon) break;
    x = sample_categorical(row_span(tables.chains[static_cast<std::size_t>(regime)], buf, x), u);
    t = t_next;
    out.path.times.push_back(t);
    out.path.states.push_back(x);
  }
  return out;
}

std::vector<SimulatedPath> simulate_paths(const ModelParams& model, int count, double horizon, std::uint64_t seed,
                                          SimulationMode mode, std::int64_t first_id) {
  if (count < 0) throw InvalidArgument("simulate_paths: negative path count");
  std::vector<SimulatedPath> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    RngStream rng(seed, static_cast<std::uint64_t>(k));
    out.push_back(mode == SimulationMode::kConditional ? simulate_conditional(model, horizon, rng)
                                                       : simulate_mixture(model, horizon, rng));
    out.back().path.id = first_id + k;
  }
  return out;
}

int state_at(const Path& path, double t) {
  std::size_t i = 0;
  while (i + 1 < path.times.size() && path.times[i + 1] <= t) ++i;
  return path.states[i];
}

}  // namespace cmjp
