#include "lipfree/ladder.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace lipfree {

double ladder_distance(double a, double b, double c, double d) {
  if (b == d) return std::abs(a - c);
  return std::min(a + c, 2.0 - a - c) + std::abs(b - d);
}

namespace {

std::string coord_label(double a, double b) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "(%.17g,%.17g)", a, b);
  return buf;
}

}  // namespace

FiniteMetricSpace build_ladder(const LadderParams& p) {
  if (p.n_levels < 1)
    throw Error(ErrorKind::Precondition, "build_ladder: n_levels must be >= 1");
  if (p.rung_resolution < 2 || p.side_resolution < 2)
    throw Error(ErrorKind::Precondition, "build_ladder: resolutions must be >= 2");
  for (double h : p.extra_rung_heights)
    if (!(h > 0.0 && h <= 0.5))
      throw Error(ErrorKind::Precondition, "build_ladder: extra rung height outside (0, 1/2]");
  for (double h : p.extra_side_heights)
    if (!(h >= 0.0 && h <= 0.5))
      throw Error(ErrorKind::Precondition, "build_ladder: extra side height outside [0, 1/2]");

  std::vector<PointMeta> pts;
  std::map<std::pair<double, double>, PointId> index;
  auto add = [&](double a, double b) {
    auto key = std::make_pair(a, b);
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    PointMeta m;
    m.label = coord_label(a, b);
    m.has_coords = true;
    m.a = a;
    m.b = b;
    PointId id = static_cast<PointId>(pts.size());
    pts.push_back(std::move(m));
    index.emplace(key, id);
    return id;
  };

  std::vector<double> rung_heights;
  for (int n = 1; n <= p.n_levels; ++n) rung_heights.push_back(std::ldexp(1.0, -n));
  rung_heights.insert(rung_heights.end(), p.extra_rung_heights.begin(),
                      p.extra_rung_heights.end());
  std::sort(rung_heights.begin(), rung_heights.end(), std::greater<>());
  rung_heights.erase(std::unique(rung_heights.begin(), rung_heights.end()), rung_heights.end());

  std::vector<double> side_heights;
  for (int j = 0; j <= p.side_resolution; ++j)
    side_heights.push_back(static_cast<double>(j) / (2.0 * p.side_resolution));
  side_heights.insert(side_heights.end(), p.extra_side_heights.begin(),
                      p.extra_side_heights.end());
  std::sort(side_heights.begin(), side_heights.end());
  side_heights.erase(std::unique(side_heights.begin(), side_heights.end()), side_heights.end());

  for (double h : rung_heights)
    for (int j = 0; j <= p.rung_resolution; ++j)
      add(static_cast<double>(j) / p.rung_resolution, h);
  for (double h : side_heights) {
    add(0.0, h);
    add(1.0, h);
  }

  PointId base = add(0.0, 0.0);  // already present via side height 0

  int n = static_cast<int>(pts.size());
  std::vector<double> dist(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double d = ladder_distance(pts[i].a, pts[i].b, pts[j].a, pts[j].b);
      dist[static_cast<size_t>(i) * n + j] = d;
      dist[static_cast<size_t>(j) * n + i] = d;
    }

  return FiniteMetricSpace(std::move(pts), std::move(dist), base, SpaceKind::Ladder);
}

bool is_ladder(const FiniteMetricSpace& space) { return space.kind() == SpaceKind::Ladder; }

PointId ladder_point(const FiniteMetricSpace& space, double a, double b) {
  auto id = space.find_coords(a, b);
  if (!id)
    throw Error(ErrorKind::Precondition,
                "ladder_point: no point at " + coord_label(a, b) + " in this space");
  return *id;
}

double height_of(const FiniteMetricSpace& space, PointId p) {
  space.check_id(p, "height_of");
  if (!space.meta(p).has_coords)
    throw Error(ErrorKind::Structural, "height_of: point has no coordinates");
  return space.meta(p).b;
}

}  // namespace lipfree
