#pragma once

#include <vector>

#include "lipfree/metric_space.hpp"

namespace lipfree {

// The two-sided ladder: horizontal rungs at heights 1/2^n for n = 1..n_levels
// joined by the vertical sides {0}x[0,1/2] and {1}x[0,1/2]. Resolutions give
// the grid on rungs (a = j/rung_resolution) and sides (b = j/(2*side_resolution)).
// extra_rung_heights / extra_side_heights insert additional rungs and side
// points at the given heights; experiments use them to place points inside
// specific height windows. Powers of two keep every coordinate and distance
// exactly representable.
struct LadderParams {
  int n_levels = 3;
  int rung_resolution = 4;
  int side_resolution = 4;
  std::vector<double> extra_rung_heights;  // each in (0, 1/2]
  std::vector<double> extra_side_heights;  // each in [0, 1/2]
};

// min{a+c, 2-a-c} + |b-d| across heights, |a-c| along a common height.
double ladder_distance(double a, double b, double c, double d);

FiniteMetricSpace build_ladder(const LadderParams& params);

bool is_ladder(const FiniteMetricSpace& space);

// Point at coordinates (a, b); throws Error(Precondition) when absent.
PointId ladder_point(const FiniteMetricSpace& space, double a, double b);

// The height coordinate pi_2 of a point; requires coordinates.
double height_of(const FiniteMetricSpace& space, PointId p);

}  // namespace lipfree
