#pragma once

#include "sirlevy/model.hpp"

// Parameter sets used across the test suite.  These mirror the built-in
// presets but are constructed by hand so the model/integrator/analysis tests
// do not depend on the config layer.
namespace fixtures {

inline sirlevy::ModelParams params1() {
  return {0.9, 0.3, 0.5, 0.05, 0.07, 0.09};
}

inline sirlevy::NoiseSpec noise1() {
  sirlevy::NoiseSpec n;
  n.sigma1 = 0.15;
  n.sigma2 = 0.25;
  n.sigma4 = 0.27;
  n.atoms = {{1.0, 0.2, 0.23, 0.1}};
  return n;
}

// Same noise as scenario 1 but a smaller inflow and a much larger contact
// rate, which flips the predicted regime from extinction to persistence.
inline sirlevy::ModelParams params2() {
  return {0.3, 0.3, 0.5, 0.05, 1.3, 0.09};
}

inline sirlevy::NoiseSpec noise2() { return noise1(); }

inline sirlevy::ModelParams params3() {
  return {0.6, 0.4, 0.3, 0.2, 0.35, 0.7};
}

inline sirlevy::NoiseSpec noise3() {
  sirlevy::NoiseSpec n;
  n.sigma1 = 0.2;
  n.sigma2 = 0.15;
  n.sigma4 = 0.13;
  n.atoms = {{1.0, 0.5, 0.3, 0.7}};
  return n;
}

inline sirlevy::ModelParams params4() {
  return {0.6, 0.4, 0.3, 0.3, 0.8, 0.2};
}

inline sirlevy::NoiseSpec noise4() {
  sirlevy::NoiseSpec n;
  n.sigma1 = 0.169;
  n.sigma2 = 0.15;
  n.sigma4 = 0.13;
  n.atoms = {{1.0, 0.5, 0.3, 0.7}};
  return n;
}

}  // namespace fixtures
