#pragma once

#include <memory>
#include <vector>

#include "tfsrc/mesh_fem.hpp"

namespace tfsrc {

/// Measured data u^delta(., t_m) for m = 0..M as full nodal vectors. Only
/// omega-weighted inner products (through mask->omega_mass) are ever taken.
struct Observation {
  std::vector<Vector> slices;
  std::shared_ptr<const SubdomainMask> mask;
  double delta = 0.0;
};

}  // namespace tfsrc
