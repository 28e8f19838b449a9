#include "lipfree/metric_graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>

namespace lipfree {

namespace {

void check_graph(const MetricGraph& g) {
  if (g.n_vertices <= 0) throw Error(ErrorKind::Structural, "metric graph: no vertices");
  if (!g.labels.empty() && static_cast<int>(g.labels.size()) != g.n_vertices)
    throw Error(ErrorKind::Structural, "metric graph: label count mismatch");
  if (g.base < 0 || g.base >= g.n_vertices)
    throw Error(ErrorKind::Structural, "metric graph: base vertex out of range");
  for (const auto& e : g.edges) {
    if (e.u < 0 || e.u >= g.n_vertices || e.v < 0 || e.v >= g.n_vertices)
      throw Error(ErrorKind::Structural, "metric graph: edge endpoint out of range");
    if (e.u == e.v) throw Error(ErrorKind::Structural, "metric graph: loop edge");
    if (!(e.length > 0)) throw Error(ErrorKind::Structural, "metric graph: edge length must be positive");
  }
}

using Adj = std::vector<std::vector<std::pair<int, int>>>;  // vertex -> (edge idx, other vertex)

Adj adjacency(const MetricGraph& g) {
  Adj adj(g.n_vertices);
  for (int e = 0; e < static_cast<int>(g.edges.size()); ++e) {
    adj[g.edges[e].u].push_back({e, g.edges[e].v});
    adj[g.edges[e].v].push_back({e, g.edges[e].u});
  }
  return adj;
}

}  // namespace

std::vector<std::vector<double>> vertex_distances(const MetricGraph& g) {
  check_graph(g);
  Adj adj = adjacency(g);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> D(g.n_vertices, std::vector<double>(g.n_vertices, inf));
  for (int s = 0; s < g.n_vertices; ++s) {
    auto& dist = D[s];
    dist[s] = 0;
    using Entry = std::pair<double, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    heap.push({0, s});
    while (!heap.empty()) {
      auto [du, u] = heap.top();
      heap.pop();
      if (du > dist[u]) continue;
      for (auto [e, v] : adj[u]) {
        double alt = du + g.edges[e].length;
        if (alt < dist[v]) {
          dist[v] = alt;
          heap.push({alt, v});
        }
      }
    }
    for (int v = 0; v < g.n_vertices; ++v)
      if (dist[v] == inf)
        throw Error(ErrorKind::Structural, "metric graph: disconnected (vertex " +
                                               std::to_string(s) + " cannot reach " +
                                               std::to_string(v) + ")");
  }
  return D;
}

std::vector<int> redundant_edges(const MetricGraph& g) {
  auto D = vertex_distances(g);
  std::vector<int> out;
  for (int e = 0; e < static_cast<int>(g.edges.size()); ++e)
    if (g.edges[e].length > D[g.edges[e].u][g.edges[e].v] + kMetricTol) out.push_back(e);
  return out;
}

FiniteMetricSpace derive_space(const MetricGraph& g) {
  GeodesicNet net(g);
  return net.to_space();
}

GeodesicNet::GeodesicNet(MetricGraph g) : g_(std::move(g)), D_(vertex_distances(g_)) {
  recs_.reserve(g_.n_vertices);
  for (int v = 0; v < g_.n_vertices; ++v) recs_.push_back({-1, 0.0});
}

PointId GeodesicNet::intern(int edge, double offset, bool /*forward_from_u*/) {
  auto key = std::make_pair(edge, offset);
  auto it = inner_index_.find(key);
  if (it != inner_index_.end()) return it->second;
  PointId id = static_cast<PointId>(recs_.size());
  recs_.push_back({edge, offset});
  inner_index_.emplace(key, id);
  return id;
}

std::vector<PointId> GeodesicNet::route_and_sample(int u, int v, int k, bool block) {
  if (u == v) throw Error(ErrorKind::Precondition, "sample_geodesic: endpoints coincide");
  if (k < 0) throw Error(ErrorKind::Precondition, "sample_geodesic: dyadic depth must be >= 0");
  if (u < 0 || u >= g_.n_vertices || v < 0 || v >= g_.n_vertices)
    throw Error(ErrorKind::Structural, "sample_geodesic: vertex out of range");

  Adj adj = adjacency(g_);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(g_.n_vertices, inf);
  std::vector<int> par_edge(g_.n_vertices, -1), par_vertex(g_.n_vertices, -1);
  dist[u] = 0;
  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  heap.push({0, u});
  while (!heap.empty()) {
    auto [dw, w] = heap.top();
    heap.pop();
    if (dw > dist[w]) continue;
    if (w != u && w != v && blocked_vertices_.count(w)) continue;
    for (auto [e, x] : adj[w]) {
      if (blocked_edges_.count(e)) continue;
      if (x != v && x != u && blocked_vertices_.count(x)) continue;
      double alt = dw + g_.edges[e].length;
      if (alt < dist[x]) {
        dist[x] = alt;
        par_edge[x] = e;
        par_vertex[x] = w;
        heap.push({alt, x});
      }
    }
  }

  double total = D_[u][v];
  if (!(dist[v] <= total + kMetricTol * std::max(1.0, total)))
    throw Error(ErrorKind::Precondition,
                "sample_geodesic: no geodesic realizing d(u,v) is available (blocked by "
                "previously selected routes or graph shape)");

  std::vector<int> chain_edges, chain_vertices{v};
  for (int w = v; w != u; w = par_vertex[w]) {
    chain_edges.push_back(par_edge[w]);
    chain_vertices.push_back(par_vertex[w]);
  }
  std::reverse(chain_edges.begin(), chain_edges.end());
  std::reverse(chain_vertices.begin(), chain_vertices.end());

  long long segments = 1LL << k;
  std::vector<PointId> out;
  out.reserve(segments + 1);
  int step = 0;
  double cum = 0.0;
  for (long long j = 0; j <= segments; ++j) {
    double s = total * (static_cast<double>(j) / static_cast<double>(segments));
    while (step < static_cast<int>(chain_edges.size()) - 1 &&
           cum + g_.edges[chain_edges[step]].length < s - 1e-15) {
      cum += g_.edges[chain_edges[step]].length;
      ++step;
    }
    const auto& e = g_.edges[chain_edges[step]];
    double along = s - cum;
    if (along <= 1e-15) {
      out.push_back(chain_vertices[step]);
      continue;
    }
    if (along >= e.length - 1e-15) {
      out.push_back(chain_vertices[step + 1]);
      continue;
    }
    bool forward = (e.u == chain_vertices[step]);
    double offset = forward ? along : e.length - along;
    out.push_back(intern(chain_edges[step], offset, forward));
  }

  if (block) {
    for (int e : chain_edges) blocked_edges_.insert(e);
    for (size_t i = 1; i + 1 < chain_vertices.size(); ++i)
      blocked_vertices_.insert(chain_vertices[i]);
  }
  return out;
}

double GeodesicNet::distance(PointId a, PointId b) const {
  if (a == b) return 0.0;
  const Rec& ra = recs_[a];
  const Rec& rb = recs_[b];
  if (ra.edge < 0 && rb.edge < 0) return D_[a][b];
  if (ra.edge < 0) return distance(b, a);
  const auto& ea = g_.edges[ra.edge];
  double s = ra.offset, La = ea.length;
  if (rb.edge < 0) {
    int w = b;
    return std::min(s + D_[ea.u][w], (La - s) + D_[ea.v][w]);
  }
  const auto& eb = g_.edges[rb.edge];
  double t = rb.offset, Lb = eb.length;
  if (ra.edge == rb.edge) {
    double direct = std::abs(s - t);
    double around1 = s + D_[ea.u][ea.v] + (Lb - t);
    double around2 = (La - s) + D_[ea.v][ea.u] + t;
    return std::min({direct, around1, around2});
  }
  return std::min({s + D_[ea.u][eb.u] + t, s + D_[ea.u][eb.v] + (Lb - t),
                   (La - s) + D_[ea.v][eb.u] + t, (La - s) + D_[ea.v][eb.v] + (Lb - t)});
}

FiniteMetricSpace GeodesicNet::to_space() const {
  int n = n_points();
  std::vector<PointMeta> metas(n);
  for (int i = 0; i < n; ++i) {
    const Rec& r = recs_[i];
    if (r.edge < 0) {
      metas[i].label = g_.labels.empty() ? "v" + std::to_string(i) : g_.labels[i];
    } else {
      char buf[48];
      std::snprintf(buf, sizeof(buf), "e%d@%.17g", r.edge, r.offset);
      metas[i].label = buf;
    }
  }
  std::vector<double> dist(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double d = distance(i, j);
      dist[static_cast<size_t>(i) * n + j] = d;
      dist[static_cast<size_t>(j) * n + i] = d;
    }
  return FiniteMetricSpace(std::move(metas), std::move(dist), g_.base, SpaceKind::GraphDerived);
}

GeodesicSampleResult sample_geodesic(const MetricGraph& g, int u, int v, int k) {
  GeodesicNet net(g);
  std::vector<PointId> pts = net.route_and_sample(u, v, k, false);
  return {net.to_space(), std::move(pts)};
}

}  // namespace lipfree
