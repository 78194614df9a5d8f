#include <immintrin.h>

#include <algorithm>

#include "cmjp/kernels.hpp"

namespace cmjp::kernels::avx2 {

// Four paths per register; per-lane accumulation order matches the scalar loop.
void regime_loglik(const PathBatch& batch, std::span<const double> coef, int num_regimes,
                   std::span<double> out) {
  const int k_count = batch.num_paths();
  const int fstride = batch.feature_stride();
  const int kstride = batch.path_stride();
  const int nf = batch.num_features();
  const double* feat = batch.feature_major();
  const __m256d zero = _mm256_setzero_pd();
  alignas(32) double lanes[4];
  for (int k0 = 0; k0 < k_count; k0 += 4) {
    for (int m = 0; m < num_regimes; ++m) {
      const double* c = coef.data() + static_cast<std::ptrdiff_t>(m) * fstride;
      __m256d acc = _mm256_setzero_pd();
      for (int f = 0; f < nf; ++f) {
        const __m256d v = _mm256_loadu_pd(feat + static_cast<std::ptrdiff_t>(f) * kstride + k0);
        const __m256d prod = _mm256_mul_pd(v, _mm256_set1_pd(c[f]));
        const __m256d nonzero = _mm256_cmp_pd(v, zero, _CMP_NEQ_OQ);
        acc = _mm256_add_pd(acc, _mm256_and_pd(prod, nonzero));
      }
      _mm256_store_pd(lanes, acc);
      const int n = std::min(4, k_count - k0);
      for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(k0 + i) * num_regimes + m] = lanes[i];
    }
  }
}

// Four features per register, paths accumulated in order.
void weighted_feature_sums(const PathBatch& batch, std::span<const double> weights, int num_regimes,
                           std::span<double> out) {
  const int stride = batch.feature_stride();
  std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(num_regimes) * stride, 0.0);
  const double* feat = batch.path_major();
  for (int k = 0; k < batch.num_paths(); ++k) {
    const double* row = feat + static_cast<std::ptrdiff_t>(k) * stride;
    for (int m = 0; m < num_regimes; ++m) {
      const __m256d w = _mm256_set1_pd(weights[static_cast<std::size_t>(k) * num_regimes + m]);
      double* acc = out.data() + static_cast<std::ptrdiff_t>(m) * stride;
      for (int f = 0; f < stride; f += 4) {
        const __m256d sum = _mm256_add_pd(_mm256_loadu_pd(acc + f), _mm256_mul_pd(w, _mm256_loadu_pd(row + f)));
        _mm256_storeu_pd(acc + f, sum);
      }
    }
  }
}

}  // namespace cmjp::kernels::avx2
