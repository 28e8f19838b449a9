#pragma once

#include <map>
#include <utility>
#include <vector>

#include "lipfree/metric_space.hpp"

namespace lipfree {

struct LipPair {
  double constant = 0.0;
  PointId p = -1, q = -1;  // attaining pair, (-1,-1) for constants
};

// Exact pairwise maximum of |v(p)-v(q)|/d(p,q); O(n^2).
LipPair lip_constant_pair(const FiniteMetricSpace& space, const std::vector<double>& values);
double lip_constant(const FiniteMetricSpace& space, const std::vector<double>& values);

// Real-valued function on every point, anchored to 0 at the base point. The
// Lipschitz constant and its attaining pair are computed on construction.
class LipFunction {
 public:
  LipFunction(const FiniteMetricSpace& space, std::vector<double> values);

  double operator()(PointId p) const { return values_[p]; }
  const std::vector<double>& values() const { return values_; }
  double lip() const { return lip_.constant; }
  const LipPair& attaining() const { return lip_; }
  int size() const { return static_cast<int>(values_.size()); }
  const FiniteMetricSpace* space() const { return space_; }

  LipFunction scaled(double factor) const;

 private:
  const FiniteMetricSpace* space_;
  std::vector<double> values_;
  LipPair lip_;
};

// Maximal L-Lipschitz extension: value(x) = min over y in S of partial(y) + L d(x,y).
// The partial data must be L-Lipschitz on S (within check_tol, error names the
// violating pair). If S contains the base its value must be 0; otherwise the
// extension is re-anchored by subtracting its value at the base, which shifts
// all values by a constant.
LipFunction mcshane_extend(const FiniteMetricSpace& space, const std::map<PointId, double>& partial,
                           double L, double check_tol = 1e-12);

// Minimal extension: value(x) = max over y in S of partial(y) - L d(x,y).
LipFunction mcshane_extend_lower(const FiniteMetricSpace& space,
                                 const std::map<PointId, double>& partial, double L,
                                 double check_tol = 1e-12);

// f_xy(p) = d(x,y)/2 * (d(y,p) - d(x,p)) / (d(x,p) + d(y,p)), re-anchored to 0
// at the base; unit Lipschitz norm, f_xy(x) - f_xy(y) = d(x,y), and
// <f_xy, m_xy> = 1.
LipFunction f_xy_builder(const FiniteMetricSpace& space, PointId x, PointId y);

// Coordinate projections of a ladder space, anchored at the base.
std::pair<LipFunction, LipFunction> projections(const FiniteMetricSpace& ladder);

struct BumpResult {
  LipFunction f;
  bool base_inside;  // base lay inside the bump; values were re-anchored
};

// max(0, r - d(u, p)); 1-Lipschitz hat supported on the closed ball B(p, r).
BumpResult bump(const FiniteMetricSpace& space, PointId p, double r);

}  // namespace lipfree
