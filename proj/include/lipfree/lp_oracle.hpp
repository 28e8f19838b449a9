#pragma once

#include <map>

#include "lipfree/free_space.hpp"

namespace lipfree {

// Independent cross-check for the flow-based norm. A dense two-phase tableau
// simplex solves the transport program min sum d(u,v) x_uv over conservation
// constraints; the simplex multipliers are a vertex of the O(n^2)-constraint
// Lipschitz polytope {f : f(u)-f(v) <= d(u,v), f(base) = 0}. Both the primal
// optimum and the dual pairing are returned, and the oracle verifies Lipschitz
// feasibility and strong duality internally before returning.
struct LpResult {
  double primal_value = 0.0;                // sum d(u,v) x_uv at the optimum
  double dual_value = 0.0;                  // sum coeff(p) f(p) for the multipliers
  std::map<PointId, double> potentials;     // f on support plus base
  int iterations = 0;
};

LpResult lp_norm_oracle(const FiniteMetricSpace& space, const FreeElement& elem);

}  // namespace lipfree
