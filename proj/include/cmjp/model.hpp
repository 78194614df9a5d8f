#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cmjp/matcore.hpp"

namespace cmjp {

// Parameters of an M-regime conditional Markov jump process on p states.
// States and regimes are 0-based in memory; file formats use 1-based labels.
struct ModelParams {
  int num_states = 0;
  int num_regimes = 0;
  Vector alpha;              // initial-state law, length p
  Matrix phi;                // p x M, row x is the regime law given X_0 = x
  std::vector<Matrix> rates;  // M generators, p x p

  // q_{x,m}: total rate out of x under regime m (sum of off-diagonal rates).
  double exit_rate(int x, int m) const;
};

// One continuously observed trajectory on [0, horizon].
struct Path {
  std::int64_t id = 0;
  std::vector<double> times;  // epoch times, times[0] == 0
  std::vector<int> states;    // state entered at each epoch
  double horizon = 0.0;

  int num_jumps() const { return static_cast<int>(states.size()) - 1; }
};

// Per-path sufficient statistics (B, N, T).
struct SufficientStats {
  std::int64_t id = 0;
  int initial_state = 0;
  Vector initial;     // B: indicator of the initial state
  Matrix counts;      // N: transition counts, zero diagonal
  Vector occupation;  // T: time spent in each state
  double horizon = 0.0;

  int num_states() const { return static_cast<int>(initial.size()); }
};

// Throws InvalidArgument listing every violated invariant, each prefixed by
// its field path (e.g. "Q[2] row 1 sums to 0.3").
const ModelParams& validate_model(const ModelParams& params);

// Same checks, returned as messages instead of thrown.
std::vector<std::string> model_violations(const ModelParams& params);

void validate_path(const Path& path, int num_states);

// Jump chain of a generator. Rows with zero exit rate are all zeros.
Matrix embedded_chain(const Matrix& generator);

SufficientStats path_stats(const Path& path, int num_states);

// Free-parameter layout: phi[x][m] for m < M-1 (row order), then the
// off-diagonal rates q[x][y] of regime 0, regime 1, ... in row-major order.
// alpha and phi[x][M-1] are not free.
class ParamLayout {
 public:
  enum class Kind { kPhi, kRate };
  struct Entry {
    Kind kind;
    int x;
    int y;  // target state for rates, unused for phi
    int m;
  };

  ParamLayout(int num_states, int num_regimes);

  int num_states() const { return num_states_; }
  int num_regimes() const { return num_regimes_; }
  int size() const { return static_cast<int>(entries_.size()); }
  int num_phi() const { return num_states_ * (num_regimes_ - 1); }
  const Entry& operator[](int i) const { return entries_[static_cast<std::size_t>(i)]; }
  const std::vector<Entry>& entries() const { return entries_; }

  int phi_index(int x, int m) const;
  int rate_index(int x, int y, int m) const;

  // "phi[1,1]" and "q[1,2,1]" style labels, 1-based.
  std::string name(int i) const;

 private:
  int num_states_;
  int num_regimes_;
  std::vector<Entry> entries_;
};

// |theta| = p(M-1) + M p(p-1).
int free_parameter_count(int num_states, int num_regimes);

Vector to_vector(const ModelParams& params);

// Rebuilds a model from free parameters. alpha is taken from `alpha`;
// phi[x][M-1] and the generator diagonals are derived.
ModelParams from_vector(const Vector& values, int num_states, int num_regimes,
                        const Vector& alpha);

// Reorders regimes: result regime j is input regime order[j].
ModelParams permute_regimes(const ModelParams& params, const std::vector<int>& order);

}  // namespace cmjp
