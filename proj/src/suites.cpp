#include "lipfree/suites.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "lipfree/lp_oracle.hpp"

namespace lipfree {

using nlohmann::json;

FiniteMetricSpace random_space(Rng& rng, int n) {
  if (rng.coin()) {
    // Euclidean cloud in the unit square; redraw on (near-)coincident points.
    while (true) {
      std::vector<std::pair<double, double>> pts(n);
      for (auto& [x, y] : pts) {
        x = rng.uniform();
        y = rng.uniform();
      }
      std::vector<double> dist(static_cast<size_t>(n) * n, 0.0);
      double min_d = 1.0;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          double dx = pts[i].first - pts[j].first, dy = pts[i].second - pts[j].second;
          double d = std::sqrt(dx * dx + dy * dy);
          min_d = std::min(min_d, d);
          dist[static_cast<size_t>(i) * n + j] = d;
          dist[static_cast<size_t>(j) * n + i] = d;
        }
      if (min_d < 1e-7) continue;
      return FiniteMetricSpace(std::vector<PointMeta>(n), std::move(dist), 0);
    }
  }
  // Shortest-path metric of a random connected graph.
  MetricGraph g;
  g.n_vertices = n;
  for (int v = 1; v < n; ++v)
    g.edges.push_back({rng.uniform_int(0, v - 1), v, rng.uniform(0.2, 2.0)});
  int extra = rng.uniform_int(0, n);
  for (int e = 0; e < extra; ++e) {
    int u = rng.uniform_int(0, n - 1), v = rng.uniform_int(0, n - 1);
    if (u != v) g.edges.push_back({u, v, rng.uniform(0.2, 2.0)});
  }
  return derive_space(g);
}

FreeElement random_element(Rng& rng, const FiniteMetricSpace& space, int max_support) {
  int n = space.size();
  int k = rng.uniform_int(2, std::min(max_support, n - 1));
  std::map<PointId, double> coeffs;
  while (static_cast<int>(coeffs.size()) < k) {
    int p = rng.uniform_int(0, n - 1);
    if (p == space.base()) continue;
    coeffs[p] = rng.uniform(-2.0, 2.0);
  }
  if (rng.coin(0.25)) {
    // Balanced variant: zero total mass.
    double s = 0;
    auto last = std::prev(coeffs.end());
    for (auto it = coeffs.begin(); it != last; ++it) s += it->second;
    last->second = -s;
  }
  return FreeElement::from_coeffs(coeffs, space.base());
}

json OracleSuiteReport::to_json() const {
  json inst = json::array();
  for (const auto& s : instances) inst.push_back({{"n", s.n}, {"support", s.support}, {"gap", s.gap}});
  return json{{"algorithm", Rng::kAlgorithm},
              {"seed", seed},
              {"count", count},
              {"max_primal_dual_gap", max_gap},
              {"max_lip_slack", max_lip_slack},
              {"max_dual_pairing_gap", max_dual_pairing_gap},
              {"max_conservation_gap", max_conservation_gap},
              {"instances", std::move(inst)}};
}

OracleSuiteReport run_oracle_suite(std::uint64_t seed, int count) {
  Rng rng(seed);
  OracleSuiteReport rep;
  rep.seed = seed;
  rep.count = count;
  for (int it = 0; it < count; ++it) {
    int n = rng.uniform_int(6, 40);
    FiniteMetricSpace space = random_space(rng, n);
    FreeElement elem = random_element(rng, space);

    NormCertificate cert = norm(space, elem);
    LpResult lp = lp_norm_oracle(space, elem);

    double gap = std::abs(cert.value - lp.dual_value);
    rep.max_gap = std::max(rep.max_gap, gap);
    rep.max_lip_slack = std::max(rep.max_lip_slack, cert.potentials.lip() - 1.0);
    rep.max_dual_pairing_gap =
        std::max(rep.max_dual_pairing_gap, std::abs(pairing(cert.potentials, elem) - cert.value));

    std::map<PointId, double> net;
    for (const FlowArc& a : cert.flow) {
      net[a.from] += a.amount;
      net[a.to] -= a.amount;
    }
    for (const auto& [p, c] : elem.coeffs())
      rep.max_conservation_gap = std::max(rep.max_conservation_gap, std::abs(net[p] - c));

    rep.instances.push_back({n, static_cast<int>(elem.coeffs().size()), gap});
  }
  return rep;
}

std::vector<TrendTest> default_trend_tests() {
  std::vector<TrendTest> tests;
  tests.push_back({"affine",
                   [](const FiniteMetricSpace&, PointId, double t) { return t; },
                   0, 1.0});
  tests.push_back({"vee_third",  // breakpoint off the dyadic grid
                   [](const FiniteMetricSpace&, PointId, double t) { return std::abs(t - 1.0 / 3.0); },
                   1, 1.0});
  tests.push_back({"dist_to_base",
                   [](const FiniteMetricSpace& s, PointId p, double) {
                     return s.dist(p, s.base());
                   },
                   -1, 0.0});
  return tests;
}

std::string zigzag_csv(const MetricGraph& g, const std::vector<std::pair<int, int>>& pairs,
                       int k_lo, int k_hi) {
  ZigzagFamily fam = make_zigzag(g, pairs, k_hi);
  const FiniteMetricSpace& space = fam.space();
  auto tests = default_trend_tests();
  std::vector<TrendRow> rows = weak_null_trend(fam, tests, k_lo, k_hi);

  std::ostringstream csv;
  csv << "k,norm_mu,norm_y_plus,norm_y_minus,max_test_pairing\n";
  char buf[256];
  for (int k = k_lo; k <= k_hi; ++k) {
    FreeElement mu = fam.mu(k);
    FreeElement yp = fam.y();
    yp.axpy(1.0, mu, space.base());
    FreeElement ym = fam.y();
    ym.axpy(-1.0, mu, space.base());
    double max_pair = 0;
    for (const auto& row : rows)
      if (row.k == k) max_pair = std::max(max_pair, row.abs_pairing);
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g\n", k,
                  norm_value(space, mu), norm_value(space, yp), norm_value(space, ym), max_pair);
    csv << buf;
  }
  return csv.str();
}

json nonwasq_to_json(const NonWasqResult& res) {
  json strips = json::array();
  for (const auto& s : res.strips)
    strips.push_back({{"delta", s.delta},
                      {"rung_height", s.rung_height},
                      {"k", s.k},
                      {"nu_norm", s.nu_norm},
                      {"pairing", s.pairing_glued},
                      {"bound", s.bound},
                      {"g_mxy", s.g_mxy}});
  return json{{"deltas", res.deltas},
              {"strips", std::move(strips)},
              {"lip_glued", res.lip_glued},
              {"normalized_min", res.normalized_min},
              {"reference_threshold", 1.0 / 6.0}};
}

Ssd2pScene build_ssd2p_path_scene(double d_param, double eps, int n_anchors, int m_y_molecules) {
  if (n_anchors < 2 || m_y_molecules < 1 || m_y_molecules > n_anchors - 1)
    throw Error(ErrorKind::Precondition, "ssd2p scene: bad anchor or molecule count");

  double R = 0.25;        // anchors at integer positions, min pairwise distance 1
  double r = eps * R / 2.0;

  std::vector<double> pos;
  pos.push_back(0.0);
  for (int i = 1; i <= n_anchors; ++i) {
    double a = static_cast<double>(i);
    pos.push_back(a);
    for (double off : {r, r / 2, R / 2, R}) {
      pos.push_back(a - off);
      pos.push_back(a + off);
    }
  }
  for (int j = 1; j <= m_y_molecules; ++j) {
    double a = static_cast<double>(j);
    pos.push_back(a + ((j % 3 == 0) ? 3.0 / 16.0 : 3.0 / 8.0));
    pos.push_back(a + 5.0 / 8.0);
  }
  std::sort(pos.begin(), pos.end());
  pos.erase(std::unique(pos.begin(), pos.end()), pos.end());

  MetricGraph g;
  g.n_vertices = static_cast<int>(pos.size());
  for (int i = 0; i + 1 < g.n_vertices; ++i)
    g.edges.push_back({i, i + 1, pos[i + 1] - pos[i]});
  g.base = 0;

  Ssd2pScene scene;
  scene.space = std::make_shared<const FiniteMetricSpace>(derive_space(g));
  const FiniteMetricSpace& space = *scene.space;

  auto at = [&](double x) {
    auto it = std::lower_bound(pos.begin(), pos.end(), x);
    if (it == pos.end() || *it != x)
      throw Error(ErrorKind::Structural, "ssd2p scene: missing grid position");
    return static_cast<PointId>(it - pos.begin());
  };

  std::vector<PointId> anchors;
  for (int i = 1; i <= n_anchors; ++i) anchors.push_back(at(static_cast<double>(i)));

  Ssd2pOptions opts;
  opts.enforce_anchor_count = (4.0 / n_anchors <= eps);
  scene.instance = build_instance(space, anchors, d_param, eps, opts);

  for (int j = 1; j <= m_y_molecules; ++j) {
    double a = static_cast<double>(j);
    double u = a + ((j % 3 == 0) ? 3.0 / 16.0 : 3.0 / 8.0);
    double v = a + 5.0 / 8.0;
    scene.y.axpy(1.0 / m_y_molecules, molecule_element(space, at(u), at(v)), space.base());
  }

  // Slice elements: inward molecules inside each bump, alternating variants.
  for (int i = 1; i <= n_anchors; ++i) {
    double a = static_cast<double>(i);
    PointId p, q;
    if (i % 2 == 0) {
      p = at(a);
      q = at(a + r / 2);
    } else {
      p = at(a - r / 2);
      q = at(a - r);
    }
    scene.xs.push_back(molecule_element(space, p, q));
  }
  return scene;
}

json refutation_to_json(const RefutationReport& rep, const Ssd2pInstance& inst) {
  json z = json::object();
  for (const auto& [p, c] : rep.z.coeffs()) z[std::to_string(p)] = c;
  return json{{"d", inst.d_param},
              {"eps", inst.eps},
              {"n_slices", inst.n},
              {"R", inst.R},
              {"r", inst.r},
              {"selected_index", rep.index},
              {"weighted_j_mass", rep.weighted_j_mass},
              {"j_bound", rep.j_bound},
              {"z_coeffs", std::move(z)},
              {"dist_x_z", rep.dist_x_z},
              {"fg_gap", rep.fg_gap},
              {"fg_bound", rep.fg_bound},
              {"d_g_y", rep.d_g_y},
              {"d_g_y_bound", rep.d_g_y_bound},
              {"chain_value", rep.chain_value},
              {"chain_bound", rep.chain_bound},
              {"norm_z_dy", rep.norm_z_dy},
              {"norm_x_dy", rep.norm_x_dy},
              {"final_bound", rep.final_bound},
              {"verdict_outside_ball", rep.verdict}};
}

}  // namespace lipfree
