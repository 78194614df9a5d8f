#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "cmjp/errors.hpp"
#include "cmjp/kernels.hpp"

namespace cmjp::kernels {
namespace {

int round_up4(int n) { return (n + 3) / 4 * 4; }

SimdLevel initial_level() {
  SimdLevel level = detected_level();
  if (const char* env = std::getenv("CMJP_SIMD")) {
    const std::string v(env);
    if (v == "scalar") level = SimdLevel::kScalar;
    else if (v == "avx2" && detected_level() == SimdLevel::kAvx2) level = SimdLevel::kAvx2;
  }
  return level;
}

std::atomic<SimdLevel>& level_slot() {
  static std::atomic<SimdLevel> slot{initial_level()};
  return slot;
}

}  // namespace

std::string_view level_name(SimdLevel level) {
  switch (level) {
    case SimdLevel::kScalar: return "scalar";
    case SimdLevel::kAvx2: return "avx2";
  }
  return "unknown";
}

SimdLevel detected_level() {
#if defined(CMJP_HAVE_AVX2)
  static const bool has_avx2 = __builtin_cpu_supports("avx2");
  if (has_avx2) return SimdLevel::kAvx2;
#endif
  return SimdLevel::kScalar;
}

SimdLevel active_level() { return level_slot().load(std::memory_order_relaxed); }

void set_active_level(SimdLevel level) {
  if (level == SimdLevel::kAvx2 && detected_level() != SimdLevel::kAvx2) {
    throw InvalidArgument("AVX2 kernels are not available on this CPU");
  }
  level_slot().store(level, std::memory_order_relaxed);
}

PathBatch::PathBatch(std::span<const SufficientStats> stats) {
  num_paths_ = static_cast<int>(stats.size());
  if (stats.empty()) return;
  num_states_ = stats[0].num_states();
  const int p = num_states_;
  num_features_ = p * (p - 1) + 2 * p;
  feature_stride_ = round_up4(num_features_);
  path_stride_ = round_up4(num_paths_);
  path_major_.assign(static_cast<std::size_t>(num_paths_) * feature_stride_, 0.0);
  feature_major_.assign(static_cast<std::size_t>(num_features_) * path_stride_, 0.0);
  initial_states_.resize(static_cast<std::size_t>(num_paths_));
  for (int k = 0; k < num_paths_; ++k) {
    const SufficientStats& s = stats[static_cast<std::size_t>(k)];
    if (s.num_states() != p) throw InvalidArgument("PathBatch: paths disagree on state count");
    initial_states_[static_cast<std::size_t>(k)] = s.initial_state;
    double* row = path_major_.data() + static_cast<std::ptrdiff_t>(k) * feature_stride_;
    int f = 0;
    for (int x = 0; x < p; ++x) {
      for (int y = 0; y < p; ++y) {
        if (y != x) row[f++] = s.counts(x, y);
      }
    }
    for (int x = 0; x < p; ++x) row[f++] = s.occupation[x];
    for (int x = 0; x < p; ++x) row[f++] = s.initial[x];
    for (int g = 0; g < num_features_; ++g) {
      feature_major_[static_cast<std::size_t>(g) * path_stride_ + k] = row[g];
    }
  }
}

std::vector<double> regime_coefficients(const ModelParams& model, int feature_stride, bool include_phi) {
  const int p = model.num_states;
  const int m_count = model.num_regimes;
  std::vector<double> coef(static_cast<std::size_t>(m_count) * feature_stride, 0.0);
  const double neg_inf = -std::numeric_limits<double>::infinity();
  for (int m = 0; m < m_count; ++m) {
    double* c = coef.data() + static_cast<std::ptrdiff_t>(m) * feature_stride;
    const Matrix& q = model.rates[static_cast<std::size_t>(m)];
    int f = 0;
    for (int x = 0; x < p; ++x) {
      for (int y = 0; y < p; ++y) {
        if (y != x) c[f++] = q(x, y) > 0.0 ? std::log(q(x, y)) : neg_inf;
      }
    }
    for (int x = 0; x < p; ++x) c[f++] = -model.exit_rate(x, m);
    for (int x = 0; x < p; ++x) {
      const double ph = model.phi(x, m);
      c[f++] = include_phi ? (ph > 0.0 ? std::log(ph) : neg_inf) : 0.0;
    }
  }
  return coef;
}

void regime_loglik(const PathBatch& batch, std::span<const double> coef, int num_regimes,
                   std::span<double> out) {
#if defined(CMJP_HAVE_AVX2)
  if (active_level() == SimdLevel::kAvx2) return avx2::regime_loglik(batch, coef, num_regimes, out);
#endif
  scalar::regime_loglik(batch, coef, num_regimes, out);
}

void weighted_feature_sums(const PathBatch& batch, std::span<const double> weights, int num_regimes,
                           std::span<double> out) {
#if defined(CMJP_HAVE_AVX2)
  if (active_level() == SimdLevel::kAvx2) {
    return avx2::weighted_feature_sums(batch, weights, num_regimes, out);
  }
#endif
  scalar::weighted_feature_sums(batch, weights, num_regimes, out);
}

}  // namespace cmjp::kernels
