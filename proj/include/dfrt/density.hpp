#pragma once

#include "dfrt/grid.hpp"

namespace dfrt {

/// Complex bi-expectation density n_θ(x) sampled on a grid.
///
/// ∫n_θ = particle_number + 0i.
struct ComplexDensity {
  Grid1D grid;
  CVector values;
  int particle_number = 0;

  Complex total() const { return integrate(grid, values); }
};

}  // namespace dfrt
