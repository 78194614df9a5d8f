#pragma once

#include "cmjp/model.hpp"

namespace fixtures {

inline cmjp::Matrix m3(double a, double b, double c, double d, double e, double f, double g, double h, double i) {
  cmjp::Matrix m(3, 3);
  m << a, b, c, d, e, f, g, h, i;
  return m;
}

// Three states, three regimes: the simulation-study design.
inline cmjp::ModelParams three_regime_model() {
  cmjp::ModelParams m;
  m.num_states = 3;
  m.num_regimes = 3;
  m.alpha = cmjp::Vector::Constant(3, 1.0 / 3.0);
  m.phi = m3(0.5, 0.3, 0.2, 0.25, 0.55, 0.2, 0.6, 0.1, 0.3);
  m.rates = {m3(-2.0, 1.2, 0.8, 0.2, -0.4, 0.2, 1.2, 1.8, -3.0), m3(-3.0, 2.4, 0.6, 0.2, -0.4, 0.2, 0.4, 1.6, -2.0),
             m3(-4.0, 1.6, 2.4, 0.2, -0.4, 0.2, 3.0, 2.0, -5.0)};
  return m;
}

// Two-regime model-selection design: the first two generators, phi[x][1] =
// (0.5, 0.25, 0.6).
inline cmjp::ModelParams two_regime_model() {
  cmjp::ModelParams m = three_regime_model();
  m.num_regimes = 2;
  m.phi.resize(3, 2);
  m.phi << 0.5, 0.5, 0.25, 0.75, 0.6, 0.4;
  m.rates.pop_back();
  return m;
}

}  // namespace fixtures
