#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "cmjp/model.hpp"

// Batched inner loops of the E- and M-steps. Every routine has a scalar
// reference and SIMD variants that reproduce it bit-for-bit: SIMD lanes run
// over independent paths (log-likelihoods) or independent features (weighted
// sums), and each lane accumulates in the same order as the scalar loop.
namespace cmjp::kernels {

enum class SimdLevel { kScalar = 0, kAvx2 = 1 };

std::string_view level_name(SimdLevel level);

// Best level supported by the running CPU.
SimdLevel detected_level();

// Level used by the dispatched entry points. Defaults to detected_level(),
// overridable with CMJP_SIMD=scalar|avx2 or set_active_level().
SimdLevel active_level();
void set_active_level(SimdLevel level);

// Feature table of K paths. Per-path feature order:
//   N[x][y] for y != x (row-major), then T[x], then B[x].
class PathBatch {
 public:
  PathBatch() = default;
  explicit PathBatch(std::span<const SufficientStats> stats);

  int num_paths() const { return num_paths_; }
  int num_states() const { return num_states_; }
  int num_features() const { return num_features_; }
  int feature_stride() const { return feature_stride_; }  // padded to 4
  int path_stride() const { return path_stride_; }        // padded to 4

  int count_offset() const { return 0; }
  int occupation_offset() const { return num_states_ * (num_states_ - 1); }
  int initial_offset() const { return occupation_offset() + num_states_; }

  // K x feature_stride, row per path.
  const double* path_major() const { return path_major_.data(); }
  // num_features x path_stride, row per feature.
  const double* feature_major() const { return feature_major_.data(); }

  int initial_state(int k) const { return initial_states_[static_cast<std::size_t>(k)]; }

 private:
  int num_paths_ = 0;
  int num_states_ = 0;
  int num_features_ = 0;
  int feature_stride_ = 0;
  int path_stride_ = 0;
  std::vector<double> path_major_;
  std::vector<double> feature_major_;
  std::vector<int> initial_states_;
};

// M x feature_stride coefficient table: log q_{xy,m} against counts, -q_{x,m}
// against occupation times, and log phi_{x,m} (or 0 when include_phi is false)
// against the initial-state indicator. Zero rates give -inf.
std::vector<double> regime_coefficients(const ModelParams& model, int feature_stride, bool include_phi);

// out[k*M + m] = sum_f feature[k][f] * coef[m][f], skipping zero features
// (so 0 * log 0 contributes 0).
void regime_loglik(const PathBatch& batch, std::span<const double> coef, int num_regimes,
                   std::span<double> out);

// out[m*feature_stride + f] = sum_k weights[k*M + m] * feature[k][f], summed in
// path order.
void weighted_feature_sums(const PathBatch& batch, std::span<const double> weights, int num_regimes,
                           std::span<double> out);

namespace scalar {
void regime_loglik(const PathBatch& batch, std::span<const double> coef, int num_regimes,
                   std::span<double> out);
void weighted_feature_sums(const PathBatch& batch, std::span<const double> weights, int num_regimes,
                           std::span<double> out);
}  // namespace scalar

#if defined(CMJP_HAVE_AVX2)
namespace avx2 {
void regime_loglik(const PathBatch& batch, std::span<const double> coef, int num_regimes,
                   std::span<double> out);
void weighted_feature_sums(const PathBatch& batch, std::span<const double> weights, int num_regimes,
                           std::span<double> out);
}  // namespace avx2
#endif

}  // namespace cmjp::kernels
