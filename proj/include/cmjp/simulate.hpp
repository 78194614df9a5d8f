#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cmjp/model.hpp"
#include "cmjp/rng.hpp"

namespace cmjp {

enum class SimulationMode { kConditional, kMixture };

struct SimulatedPath {
  Path path;
  // Conditional mode: regime drawn at each epoch (same length as
  // path.states). Mixture mode: the single regime drawn at time 0.
  std::vector<int> regimes;
  SimulationMode mode = SimulationMode::kConditional;
};

// Inverse-CDF draw with half-open cells [c_{k-1}, c_k). Returns a 0-based
// index. probs must sum to 1 within 1e-9 and u must lie in [0, 1).
int sample_categorical(std::span<const double> probs, double u);

// Epoch-by-epoch recursion: at each epoch the regime is redrawn from the
// switching posterior of the realised prefix. Variates are consumed as U_0,
// then (W_n, V_n, U_{n+1}) per epoch, one triple per epoch even when the path
// stops there.
SimulatedPath simulate_conditional(const ModelParams& model, double horizon, RngStream& rng);

// Draws X_0, then the regime once from phi[X_0, .], then runs a plain Markov
// jump process under that regime. Variates: U_0, W_0, then (V_n, U_{n+1}).
SimulatedPath simulate_mixture(const ModelParams& model, double horizon, RngStream& rng);

// K paths with ids first_id, first_id + 1, ...; path k uses RngStream(seed, k).
std::vector<SimulatedPath> simulate_paths(const ModelParams& model, int count, double horizon,
                                          std::uint64_t seed, SimulationMode mode,
                                          std::int64_t first_id = 1);

// State occupied at time t (t within [0, horizon]).
int state_at(const Path& path, double t);

}  // namespace cmjp
