#include "lipfree/lip_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace lipfree {

LipPair lip_constant_pair(const FiniteMetricSpace& space, const std::vector<double>& values) {
  if (values.size() != static_cast<size_t>(space.size()))
    throw Error(ErrorKind::Structural, "lip_constant: values not defined on all points");
  LipPair best;
  int n = space.size();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double ratio = std::abs(values[i] - values[j]) / space.dist(i, j);
      if (ratio > best.constant) best = {ratio, i, j};
    }
  return best;
}

double lip_constant(const FiniteMetricSpace& space, const std::vector<double>& values) {
  return lip_constant_pair(space, values).constant;
}

LipFunction::LipFunction(const FiniteMetricSpace& space, std::vector<double> values)
    : space_(&space), values_(std::move(values)) {
  if (values_.size() != static_cast<size_t>(space.size()))
    throw Error(ErrorKind::Structural, "LipFunction: values not defined on all points");
  if (std::abs(values_[space.base()]) > 1e-9)
    throw Error(ErrorKind::Structural, "LipFunction: value at base point must be 0");
  values_[space.base()] = 0.0;
  lip_ = lip_constant_pair(space, values_);
}

LipFunction LipFunction::scaled(double factor) const {
  std::vector<double> v = values_;
  for (double& x : v) x *= factor;
  return LipFunction(*space_, std::move(v));
}

namespace {

enum class Side { Upper, Lower };

LipFunction mcshane_impl(const FiniteMetricSpace& space, const std::map<PointId, double>& partial,
                         double L, double check_tol, Side side) {
  if (partial.empty())
    throw Error(ErrorKind::Precondition, "mcshane_extend: empty partial function");
  if (L < 0) throw Error(ErrorKind::Precondition, "mcshane_extend: negative Lipschitz bound");
  for (const auto& [p, v] : partial) space.check_id(p, "mcshane_extend");

  for (auto it = partial.begin(); it != partial.end(); ++it)
    for (auto jt = std::next(it); jt != partial.end(); ++jt) {
      double gap = std::abs(it->second - jt->second);
      double allowed = L * space.dist(it->first, jt->first);
      if (gap > allowed + check_tol) {
        std::ostringstream os;
        os << "mcshane_extend: partial data violates Lipschitz bound " << L << " at pair ("
           << it->first << "," << jt->first << "): |" << it->second << " - " << jt->second
           << "| > " << allowed;
        throw Error(ErrorKind::Precondition, os.str());
      }
    }

  bool has_base = partial.count(space.base()) > 0;
  if (has_base && std::abs(partial.at(space.base())) > check_tol)
    throw Error(ErrorKind::Precondition, "mcshane_extend: base point value must be 0");

  int n = space.size();
  std::vector<double> out(n);
  for (int x = 0; x < n; ++x) {
    auto it = partial.find(x);
    if (it != partial.end()) {
      out[x] = it->second;
      continue;
    }
    double best = (side == Side::Upper) ? std::numeric_limits<double>::infinity()
                                        : -std::numeric_limits<double>::infinity();
    for (const auto& [y, v] : partial) {
      double cand = (side == Side::Upper) ? v + L * space.dist(x, y) : v - L * space.dist(x, y);
      best = (side == Side::Upper) ? std::min(best, cand) : std::max(best, cand);
    }
    out[x] = best;
  }
  if (!has_base) {
    double shift = out[space.base()];
    for (double& v : out) v -= shift;
  } else {
    out[space.base()] = 0.0;
  }
  return LipFunction(space, std::move(out));
}

}  // namespace

LipFunction mcshane_extend(const FiniteMetricSpace& space, const std::map<PointId, double>& partial,
                           double L, double check_tol) {
  return mcshane_impl(space, partial, L, check_tol, Side::Upper);
}

LipFunction mcshane_extend_lower(const FiniteMetricSpace& space,
                                 const std::map<PointId, double>& partial, double L,
                                 double check_tol) {
  return mcshane_impl(space, partial, L, check_tol, Side::Lower);
}

LipFunction f_xy_builder(const FiniteMetricSpace& space, PointId x, PointId y) {
  space.check_id(x, "f_xy_builder");
  space.check_id(y, "f_xy_builder");
  if (x == y) throw Error(ErrorKind::Precondition, "f_xy_builder: x and y must differ");
  double dxy = space.dist(x, y);
  int n = space.size();
  std::vector<double> v(n);
  for (int p = 0; p < n; ++p)
    v[p] = 0.5 * dxy * (space.dist(y, p) - space.dist(x, p)) /
           (space.dist(x, p) + space.dist(y, p));
  double anchor = v[space.base()];
  for (double& val : v) val -= anchor;
  return LipFunction(space, std::move(v));
}

std::pair<LipFunction, LipFunction> projections(const FiniteMetricSpace& ladder) {
  if (ladder.kind() != SpaceKind::Ladder)
    throw Error(ErrorKind::Precondition, "projections: space was not built by build_ladder");
  int n = ladder.size();
  std::vector<double> p1(n), p2(n);
  for (int i = 0; i < n; ++i) {
    p1[i] = ladder.meta(i).a;
    p2[i] = ladder.meta(i).b;
  }
  double a0 = p1[ladder.base()], b0 = p2[ladder.base()];
  for (int i = 0; i < n; ++i) {
    p1[i] -= a0;
    p2[i] -= b0;
  }
  return {LipFunction(ladder, std::move(p1)), LipFunction(ladder, std::move(p2))};
}

BumpResult bump(const FiniteMetricSpace& space, PointId p, double r) {
  space.check_id(p, "bump");
  if (r <= 0) throw Error(ErrorKind::Precondition, "bump: radius must be positive");
  int n = space.size();
  std::vector<double> v(n);
  for (int u = 0; u < n; ++u) v[u] = std::max(0.0, r - space.dist(u, p));
  bool base_inside = v[space.base()] > 0.0;
  if (base_inside) {
    double shift = v[space.base()];
    for (double& val : v) val -= shift;
  }
  return {LipFunction(space, std::move(v)), base_inside};
}

}  // namespace lipfree
