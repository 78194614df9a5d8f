#include <algorithm>

#include "cmjp/kernels.hpp"

namespace cmjp::kernels::scalar {

void regime_loglik(const PathBatch& batch, std::span<const double> coef, int num_regimes,
                   std::span<double> out) {
  const int stride = batch.feature_stride();
  const int nf = batch.num_features();
  const double* feat = batch.path_major();
  for (int k = 0; k < batch.num_paths(); ++k) {
    const double* row = feat + static_cast<std::ptrdiff_t>(k) * stride;
    for (int m = 0; m < num_regimes; ++m) {
      const double* c = coef.data() + static_cast<std::ptrdiff_t>(m) * stride;
      double acc = 0.0;
      for (int f = 0; f < nf; ++f) {
        const double v = row[f];
        acc += v != 0.0 ? v * c[f] : 0.0;
      }
      out[static_cast<std::size_t>(k) * num_regimes + m] = acc;
    }
  }
}

void weighted_feature_sums(const PathBatch& batch, std::span<const double> weights, int num_regimes,
                           std::span<double> out) {
  const int stride = batch.feature_stride();
  std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(num_regimes) * stride, 0.0);
  const double* feat = batch.path_major();
  for (int k = 0; k < batch.num_paths(); ++k) {
    const double* row = feat + static_cast<std::ptrdiff_t>(k) * stride;
    for (int m = 0; m < num_regimes; ++m) {
      const double w = weights[static_cast<std::size_t>(k) * num_regimes + m];
      double* acc = out.data() + static_cast<std::ptrdiff_t>(m) * stride;
      for (int f = 0; f < stride; ++f) acc[f] += w * row[f];
    }
  }
}

}  // namespace cmjp::kernels::scalar
