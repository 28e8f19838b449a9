#include "lipfree/free_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace lipfree {

FreeElement FreeElement::from_coeffs(const std::map<PointId, double>& coeffs, PointId base) {
  FreeElement e;
  for (const auto& [p, v] : coeffs) e.add(p, v, base);
  return e;
}

void FreeElement::add(PointId p, double v, PointId base) {
  if (p == base || v == 0.0) return;
  double& slot = coeffs_[p];
  slot += v;
  if (slot == 0.0) coeffs_.erase(p);
}

FreeElement& FreeElement::axpy(double alpha, const FreeElement& other, PointId base) {
  for (const auto& [p, v] : other.coeffs_) add(p, alpha * v, base);
  return *this;
}

FreeElement FreeElement::scaled(double factor) const {
  FreeElement e;
  if (factor == 0.0) return e;
  for (const auto& [p, v] : coeffs_) e.coeffs_[p] = factor * v;
  return e;
}

double FreeElement::sum() const {
  double s = 0;
  for (const auto& [p, v] : coeffs_) s += v;
  return s;
}

double FreeElement::total_mass() const {
  double s = 0;
  for (const auto& [p, v] : coeffs_) s += std::abs(v);
  return s;
}

FreeElement FreeElement::pruned(double tol) const {
  FreeElement e;
  for (const auto& [p, v] : coeffs_)
    if (std::abs(v) > tol) e.coeffs_[p] = v;
  return e;
}

FreeElement molecule_element(const FiniteMetricSpace& space, PointId u, PointId v) {
  space.check_id(u, "molecule_element");
  space.check_id(v, "molecule_element");
  if (u == v)
    throw Error(ErrorKind::Precondition, "molecule_element: degenerate molecule with u == v");
  double d = space.dist(u, v);
  FreeElement e;
  e.add(u, 1.0 / d, space.base());
  e.add(v, -1.0 / d, space.base());
  return e;
}

double MolecularDecomposition::sum_lambda() const {
  double s = 0;
  for (const auto& [l, m] : terms) s += l;
  return s;
}

FreeElement as_element(const FiniteMetricSpace& space, const MolecularDecomposition& dec) {
  FreeElement e;
  for (const auto& [lambda, mol] : dec.terms) {
    double d = space.dist(mol.u, mol.v);
    e.add(mol.u, lambda / d, space.base());
    e.add(mol.v, -lambda / d, space.base());
  }
  return e;
}

namespace {

// Successive shortest paths with potentials on the complete graph over the
// element's support plus the base node. Metric costs keep reduced costs
// non-negative; Dijkstra stops at the first settled deficit node. The base is
// the last local node so that equal-cost relaxations prefer direct arcs.
struct FlowSolver {
  const FiniteMetricSpace& space;
  std::vector<PointId> pts;
  int m = 0, base_local = 0;
  std::vector<double> excess, pot;
  std::unordered_map<long long, double> flow;       // key u*m+v, amount > 0
  std::vector<std::vector<int>> inflow_from;        // v -> sources w with flow(w,v) > 0 (lazy)
  double exc_tol = 0.0;

  explicit FlowSolver(const FiniteMetricSpace& s, const FreeElement& elem) : space(s) {
    pts.reserve(elem.coeffs().size() + 1);
    double total = 0;
    for (const auto& [p, c] : elem.coeffs()) {
      space.check_id(p, "norm");
      if (p == space.base())
        throw Error(ErrorKind::Structural, "norm: element stores a base-point coefficient");
      pts.push_back(p);
      total += c;
    }
    pts.push_back(space.base());
    m = static_cast<int>(pts.size());
    base_local = m - 1;
    excess.assign(m, 0.0);
    int i = 0;
    for (const auto& [p, c] : elem.coeffs()) excess[i++] = c;
    excess[base_local] = -total;
    pot.assign(m, 0.0);
    inflow_from.assign(m, {});
    exc_tol = 1e-12 * std::max(1.0, elem.total_mass());
  }

  long long key(int u, int v) const { return static_cast<long long>(u) * m + v; }
  double d(int u, int v) const { return space.dist(pts[u], pts[v]); }

  double flow_at(int u, int v) const {
    auto it = flow.find(key(u, v));
    return it == flow.end() ? 0.0 : it->second;
  }

  void push(int u, int v, double a) {
    auto rit = flow.find(key(v, u));
    if (rit != flow.end()) {
      double c = std::min(a, rit->second);
      rit->second -= c;
      a -= c;
      if (rit->second <= 1e-15) flow.erase(rit);
    }
    if (a > 1e-15) {
      double& slot = flow[key(u, v)];
      if (slot == 0.0) inflow_from[v].push_back(u);
      slot += a;
    }
  }

  void solve() {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(m);
    std::vector<int> parent(m);
    std::vector<char> parent_back(m), settled(m);
    long long guard = 4LL * m * m + 64;

    while (true) {
      int s = -1;
      for (int i = 0; i < m; ++i)
        if (excess[i] > exc_tol) {
          s = i;
          break;
        }
      if (s < 0) break;
      if (--guard < 0)
        throw Error(ErrorKind::Verification, "norm: flow solver failed to converge");

      // Dense Dijkstra: the arc set is complete, so a linear min-scan beats a
      // heap, and deficit nodes win ties so plateaus of tight arcs exit early.
      std::fill(dist.begin(), dist.end(), inf);
      std::fill(settled.begin(), settled.end(), 0);
      dist[s] = 0;
      parent[s] = -1;
      int t = -1;
      double t_dist = 0;

      while (true) {
        double best = inf;
        for (int i = 0; i < m; ++i)
          if (!settled[i] && dist[i] < best) best = dist[i];
        if (best == inf) break;
        int u = -1;
        for (int i = 0; i < m; ++i)
          if (!settled[i] && dist[i] <= best + 1e-15) {
            if (u < 0) u = i;
            if (excess[i] < -exc_tol) {
              u = i;
              break;
            }
          }
        double du = dist[u];
        settled[u] = 1;
        if (excess[u] < -exc_tol) {
          t = u;
          t_dist = du;
          break;
        }
        for (int v = 0; v < m; ++v) {
          if (v == u || settled[v]) continue;
          double rc = d(u, v) - pot[u] + pot[v];
          if (rc < 0) rc = 0;
          if (du + rc < dist[v]) {
            dist[v] = du + rc;
            parent[v] = u;
            parent_back[v] = 0;
          }
        }
        auto& in = inflow_from[u];
        in.erase(std::remove_if(in.begin(), in.end(),
                                [&](int w) { return flow_at(w, u) <= 0.0; }),
                 in.end());
        for (int w : in) {
          if (settled[w]) continue;
          double rc = -d(w, u) - pot[u] + pot[w];
          if (rc < 0) rc = 0;
          if (du + rc < dist[w]) {
            dist[w] = du + rc;
            parent[w] = u;
            parent_back[w] = 1;
          }
        }
      }
      if (t < 0)
        throw Error(ErrorKind::Verification, "norm: no augmenting path (unbalanced instance)");

      for (int v = 0; v < m; ++v) pot[v] -= std::min(dist[v], t_dist);

      double amount = std::min(excess[s], -excess[t]);
      for (int v = t; parent[v] >= 0; v = parent[v])
        if (parent_back[v]) amount = std::min(amount, flow_at(v, parent[v]));

      for (int v = t; parent[v] >= 0; v = parent[v]) {
        int u = parent[v];
        if (parent_back[v]) {
          double& slot = flow[key(v, u)];
          slot -= amount;
          if (slot <= 1e-15) flow.erase(key(v, u));
        } else {
          push(u, v, amount);
        }
      }
      excess[s] = (amount >= excess[s]) ? 0.0 : excess[s] - amount;
      excess[t] = (amount >= -excess[t]) ? 0.0 : excess[t] + amount;
    }
  }

  double value() const {
    double v = 0;
    for (const auto& [k, a] : flow) {
      int u = static_cast<int>(k / m), w = static_cast<int>(k % m);
      v += a * d(u, w);
    }
    return v;
  }

  std::vector<FlowArc> arcs() const {
    std::vector<FlowArc> out;
    for (const auto& [k, a] : flow) {
      if (a <= 1e-14) continue;
      int u = static_cast<int>(k / m), w = static_cast<int>(k % m);
      out.push_back({pts[u], pts[w], a});
    }
    std::sort(out.begin(), out.end(), [](const FlowArc& l, const FlowArc& r) {
      return std::tie(l.from, l.to) < std::tie(r.from, r.to);
    });
    return out;
  }
};

}  // namespace

NormCertificate norm(const FiniteMetricSpace& space, const FreeElement& elem) {
  if (elem.empty())
    return {0.0, {}, LipFunction(space, std::vector<double>(space.size(), 0.0))};
  FlowSolver solver(space, elem);
  solver.solve();
  std::map<PointId, double> partial;
  double anchor = solver.pot[solver.base_local];
  for (int i = 0; i < solver.m; ++i) partial[solver.pts[i]] = solver.pot[i] - anchor;
  partial[space.base()] = 0.0;
  LipFunction potentials = mcshane_extend(space, partial, 1.0, 1e-10);
  return {solver.value(), solver.arcs(), std::move(potentials)};
}

double norm_value(const FiniteMetricSpace& space, const FreeElement& elem) {
  if (elem.empty()) return 0.0;
  FlowSolver solver(space, elem);
  solver.solve();
  return solver.value();
}

MolecularDecomposition decompose(const FiniteMetricSpace& space, const FreeElement& elem) {
  MolecularDecomposition dec;
  if (elem.empty()) return dec;
  FlowSolver solver(space, elem);
  solver.solve();
  for (const FlowArc& arc : solver.arcs())
    dec.terms.push_back({arc.amount * space.dist(arc.from, arc.to), Molecule{arc.from, arc.to}});
  return dec;
}

double pairing(const LipFunction& f, const FreeElement& elem) {
  double s = 0;
  for (const auto& [p, c] : elem.coeffs()) {
    if (p < 0 || p >= f.size())
      throw Error(ErrorKind::Structural, "pairing: element and function live on different spaces");
    s += c * f(p);
  }
  return s;
}

}  // namespace lipfree
