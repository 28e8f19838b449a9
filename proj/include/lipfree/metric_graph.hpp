#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "lipfree/metric_space.hpp"

namespace lipfree {

// Connected weighted graph whose shortest-path metric defines a
// FiniteMetricSpace. Parallel edges are allowed (they matter for theta
// graphs); an edge strictly longer than the derived distance between its
// endpoints is redundant and gets flagged, not rejected.
struct MetricGraph {
  struct Edge {
    int u, v;
    double length;
  };
  int n_vertices = 0;
  std::vector<std::string> labels;  // optional, may be empty
  std::vector<Edge> edges;
  int base = 0;
};

// Pairwise vertex distances by Dijkstra; throws Error(Structural) when the
// graph is disconnected or an edge is malformed.
std::vector<std::vector<double>> vertex_distances(const MetricGraph& g);

// Indices of edges longer than the shortest path between their endpoints.
std::vector<int> redundant_edges(const MetricGraph& g);

FiniteMetricSpace derive_space(const MetricGraph& g);

// Incrementally refinable geodesic net over a graph: vertices plus points
// inserted on edges. Distances come from the vertex matrix and edge offsets,
// so the emitted space is exact for dyadic data. Routes can block their
// interiors so later routes stay internally disjoint.
class GeodesicNet {
 public:
  explicit GeodesicNet(MetricGraph g);

  int n_vertices() const { return g_.n_vertices; }
  double vertex_distance(int u, int v) const { return D_[u][v]; }

  // Shortest path u -> v avoiding blocked edges/interior vertices, sampled at
  // 2^k + 1 equally spaced arc-length positions. The route must realize the
  // full-graph distance d(u,v); otherwise Error(Precondition). With block =
  // true the route's edges and interior vertices are excluded from later
  // routes (shared endpoints stay usable).
  std::vector<PointId> route_and_sample(int u, int v, int k, bool block);

  double distance(PointId a, PointId b) const;
  int n_points() const { return static_cast<int>(recs_.size()); }
  FiniteMetricSpace to_space() const;

 private:
  struct Rec {
    int edge;       // -1 for an original vertex (id == index)
    double offset;  // arc position from edge endpoint u
  };
  PointId intern(int edge, double offset, bool forward_from_u);

  MetricGraph g_;
  std::vector<std::vector<double>> D_;
  std::vector<Rec> recs_;
  std::map<std::pair<int, double>, PointId> inner_index_;
  std::set<int> blocked_edges_;
  std::set<int> blocked_vertices_;
};

struct GeodesicSampleResult {
  FiniteMetricSpace space;
  std::vector<PointId> points;  // p_0 = u, ..., p_{2^k} = v
};

// Single-route convenience wrapper; returns the enlarged space plus the
// ordered sample ids.
GeodesicSampleResult sample_geodesic(const MetricGraph& g, int u, int v, int k);

}  // namespace lipfree
