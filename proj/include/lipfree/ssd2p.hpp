#pragma once

#include <vector>

#include "lipfree/free_space.hpp"

namespace lipfree {

// Slice S(f, eps) = {mu in the unit ball : <f, mu> > norm_f - eps}, with the
// threshold taken relative to the computed functional norm of f.
struct SliceSpec {
  LipFunction f;
  double eps;
  double norm_f;
  Molecule witness;  // a molecule inside the bump attaining the slice
};

struct Ssd2pInstance {
  double d_param;
  double eps;
  int n;
  std::vector<PointId> anchors;
  double R;  // quarter of the minimum pairwise distance among anchors and base
  double r;  // eps * R / 2
  std::vector<SliceSpec> slices;
  std::vector<std::vector<PointId>> ball_points;  // B_i = closed R-ball around anchor i
  std::vector<std::vector<PointId>> bump_points;  // C_i = closed r-ball
};

struct Ssd2pOptions {
  // The source argument picks n with 4/n <= eps; disable to run instances
  // below that margin (the numeric bounds are still asserted downstream).
  bool enforce_anchor_count = true;
};

Ssd2pInstance build_instance(const FiniteMetricSpace& space, std::vector<PointId> anchors,
                             double d_param, double eps, const Ssd2pOptions& opts = {});

// g = f off B_i, shifted bump on C_i, McShane-extended across B_i \ C_i with
// L = 1. Requires lip(f) <= 1 - eps.
LipFunction glue_g(const FiniteMetricSpace& space, const Ssd2pInstance& inst, int i,
                   const LipFunction& f);

struct RefutationReport {
  int index;              // selected slice, minimizing the weighted J mass
  double weighted_j_mass; // weight of y-molecules touching B_index
  double j_bound;         // 2 ||y|| / n
  FreeElement z;          // inner approximant supported in C_index
  double dist_x_z;
  double fg_gap;          // <f - g, y>
  double fg_bound;        // 4 / n
  double d_g_y;           // d * <g, y>
  double d_g_y_bound;     // d - 3 eps
  double chain_value;     // <g, z> + d <g, y>
  double chain_bound;     // norm_f + d - 4 eps
  double norm_z_dy;       // engine value of ||z + d y||
  double norm_x_dy;       // engine value of ||x + d y||
  double final_bound;     // norm_f + d - 6 eps
  bool verdict;           // ||x + d y|| > 1, so x + d y left the unit ball
};

// y must be in the unit ball with ||y|| >= 1 - eps; it is decomposed and the
// pigeonhole runs on the weights. x_per_slice supplies one slice element per
// anchor; pass an empty vector to use each slice's witness molecule.
RefutationReport refute(const FiniteMetricSpace& space, const Ssd2pInstance& inst,
                        const FreeElement& y, const std::vector<FreeElement>& x_per_slice);

}  // namespace lipfree
