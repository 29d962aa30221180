// Shared fitted-representation fixtures; built once per test process.
#pragma once

#include "pvx/pipeline.hpp"
#include "pvx/representation.hpp"
#include "pvx/synth_eval.hpp"

namespace fixtures {

struct FittedScene {
  pvx::GeneratedScene scene;
  pvx::BuiltLayers built;
  pvx::Representation rep;
  std::vector<std::array<double, 3>> curve;
};

// s2_translate fitted with the oracle tracker at reduced unit-test scale.
const FittedScene& fitted_s2();

// Small static linear-gradient scene, fitted (for superresolution checks).
const FittedScene& fitted_gradient();

}  // namespace fixtures
