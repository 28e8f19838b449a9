#include <cmath>
#include <set>

#include "doctest.h"
#include "lipfree/ladder.hpp"
#include "lipfree/squareness.hpp"
#include "lipfree/suites.hpp"

using namespace lipfree;

namespace {

// Rung zigzag at height h on 2^k segments, as a certified decomposition.
MolecularDecomposition rung_zigzag(const FiniteMetricSpace& L, double h, int k) {
  MolecularDecomposition dec;
  int segs = 1 << k;
  double w = std::ldexp(1.0, -k);
  std::vector<PointId> rung(segs + 1);
  for (int j = 0; j <= segs; ++j)
    rung[j] = ladder_point(L, static_cast<double>(j) / segs, h);
  for (int j = 1; j <= segs; ++j) {
    if (j % 2 == 1)
      dec.terms.push_back({w, Molecule{rung[j], rung[j - 1]}});
    else
      dec.terms.push_back({w, Molecule{rung[j - 1], rung[j]}});
  }
  return dec;
}

}  // namespace

TEST_CASE("mol_window_members: empty, filtered, and never m_xy") {
  FiniteMetricSpace L = build_ladder(LadderParams{3, 4, 8, {}, {}});

  // A window that dodges every height in the space.
  CHECK(mol_window_members(L, {0.26, 0.3}).empty());

  MolWindow w{0.125, 0.5};
  auto members = mol_window_members(L, w);
  CHECK_FALSE(members.empty());
  std::set<std::pair<PointId, PointId>> got;
  for (const Molecule& m : members) got.insert({m.u, m.v});
  for (int u = 0; u < L.size(); ++u)
    for (int v = 0; v < L.size(); ++v) {
      if (u == v) continue;
      bool inside = L.meta(u).b > w.delta && L.meta(u).b < w.eps && L.meta(v).b > w.delta &&
                    L.meta(v).b < w.eps;
      CHECK(got.count({u, v}) == (inside ? 1u : 0u));
    }

  // pi_2(x) = pi_2(y) = 0, so m_xy never qualifies.
  PointId y = ladder_point(L, 1.0, 0.0);
  for (const Molecule& m : members) {
    CHECK(m.u != L.base());
    CHECK(m.u != y);
    CHECK(m.v != L.base());
    CHECK(m.v != y);
  }
}

TEST_CASE("flatten: single molecule instance satisfies all postconditions") {
  FiniteMetricSpace L = build_ladder(LadderParams{3, 8, 8, {}, {}});
  PointId p = ladder_point(L, 0.5, 0.25), q = ladder_point(L, 0.0, 0.25);
  PointId y = ladder_point(L, 1.0, 0.0);
  MolecularDecomposition nu;
  nu.terms.push_back({1.0, Molecule{p, q}});

  // A norming functional pinned to 0 at y, so |<g, m_xy>| = 0 < eps.
  std::map<PointId, double> partial{{q, 0.0}, {p, L.dist(p, q)}, {L.base(), 0.0}, {y, 0.0}};
  LipFunction g = mcshane_extend(L, partial, 1.0);
  REQUIRE(pairing(g, as_element(L, nu)) == doctest::Approx(1.0));

  double eps = 0.25, delta = 0.125;
  LipFunction f = flatten(L, nu, g, eps, delta);

  CHECK(f.lip() <= 1.0 + 1e-9);
  for (int i = 0; i < L.size(); ++i)
    if (L.meta(i).b <= delta) CHECK(f(i) == 0.0);
  double bound = (1.0 - eps - 2 * delta) / (1.0 + eps + 2 * delta);
  CHECK(pairing(f, as_element(L, nu)) > bound - 1e-9);
}

TEST_CASE("flatten: delta -> 0 keeps the pairing near the norm") {
  FiniteMetricSpace L = build_ladder(LadderParams{3, 8, 16, {}, {}});
  PointId p = ladder_point(L, 0.5, 0.25), q = ladder_point(L, 0.0, 0.25);
  PointId y = ladder_point(L, 1.0, 0.0);
  MolecularDecomposition nu;
  nu.terms.push_back({1.0, Molecule{p, q}});
  std::map<PointId, double> partial{{q, 0.0}, {p, L.dist(p, q)}, {L.base(), 0.0}, {y, 0.0}};
  LipFunction g = mcshane_extend(L, partial, 1.0);

  double eps = 0.01;
  for (double delta : {0.125, 0.0625, 0.03125}) {
    LipFunction f = flatten(L, nu, g, eps, delta);
    CHECK(pairing(f, as_element(L, nu)) >= 1.0 - 3 * (eps + 2 * delta));
  }
}

TEST_CASE("flatten rejects broken hypotheses by name") {
  FiniteMetricSpace L = build_ladder(LadderParams{3, 8, 8, {}, {}});
  PointId p = ladder_point(L, 0.5, 0.25), q = ladder_point(L, 0.0, 0.25);
  PointId y = ladder_point(L, 1.0, 0.0);
  MolecularDecomposition nu;
  nu.terms.push_back({1.0, Molecule{p, q}});
  std::map<PointId, double> partial{{q, 0.0}, {p, L.dist(p, q)}, {L.base(), 0.0}, {y, 0.0}};
  LipFunction g = mcshane_extend(L, partial, 1.0);

  // pi_1 pairs with m_xy beyond eps; pi_2 is blind to rung molecules.
  auto [pi1, pi2] = projections(L);
  CHECK_THROWS_WITH_AS(flatten(L, nu, pi1.scaled(-1.0), 0.25, 0.125),
                       doctest::Contains("m_xy"), Error);
  CHECK_THROWS_WITH_AS(flatten(L, nu, pi2, 0.25, 0.125),
                       doctest::Contains("does not norm"), Error);
  // delta above the support heights.
  CHECK_THROWS_WITH_AS(flatten(L, nu, g, 0.25, 0.375),
                       doctest::Contains("height <= delta"), Error);
  // no side point at the requested delta.
  CHECK_THROWS_AS(flatten(L, nu, g, 0.25, 0.3), Error);
}

TEST_CASE("molecule_filter: bottom-rung zigzag passes unchanged") {
  LadderParams p{10, 8, 4, {}, {}};
  FiniteMetricSpace L = build_ladder(p);
  double h = std::ldexp(1.0, -10);
  MolecularDecomposition zig = rung_zigzag(L, h, 3);
  FreeElement mu = as_element(L, zig);

  MoleculeFilterResult res = molecule_filter(L, mu, 0.5);
  CHECK(res.j_mass == 0.0);
  CHECK(res.split_mismatch == 0.0);
  CHECK(res.distance < 1e-12);
  CHECK(res.delta == doctest::Approx(h / 2));
  CHECK(res.nu.terms.size() == zig.terms.size());
  for (const auto& [lambda, m] : res.nu.terms) {
    CHECK(height_of(L, m.u) > res.delta);
    CHECK(height_of(L, m.u) < 0.5);
  }
}

TEST_CASE("molecule_filter rejects mass concentrated above eps/16") {
  FiniteMetricSpace L = build_ladder(LadderParams{4, 8, 4, {}, {}});
  FreeElement mu = as_element(L, rung_zigzag(L, 0.25, 3));
  CHECK(norm_value(L, mu) == doctest::Approx(1.0));
  for (double eps : {0.5, 0.25}) {
    // Inputs concentrated this high cannot be nearly square; verify numerically.
    PointId y = ladder_point(L, 1.0, 0.0);
    FreeElement plus = molecule_element(L, L.base(), y);
    plus.axpy(1.0, mu, L.base());
    CHECK(norm_value(L, plus) >= 1.0 + eps * eps / 64.0);
    CHECK_THROWS_WITH_AS(molecule_filter(L, mu, eps),
                         doctest::Contains("hypothesis failed"), Error);
  }
}

TEST_CASE("molecule_filter splits crossing molecules at the eps/16 height") {
  LadderParams p{12, 4, 16, {}, {}};  // side heights j/32 include 1/32 = eps/16
  FiniteMetricSpace L = build_ladder(p);
  double eps = 0.5, h = std::ldexp(1.0, -12), w = 1.0 / 1024.0;

  FreeElement mu = as_element(L, rung_zigzag(L, h, 2)).scaled(1.0 - w);
  PointId lo = ladder_point(L, 0.0, 1.0 / 64.0), hi = ladder_point(L, 0.0, 1.0 / 16.0);
  mu.axpy(w, molecule_element(L, lo, hi), L.base());

  MoleculeFilterResult res = molecule_filter(L, mu, eps);
  CHECK(res.j_mass > 0.0);
  CHECK(res.j_mass < 5 * w);
  CHECK(res.distance < eps);
  CHECK(res.distance <= res.j_mass + 1e-12);
  CHECK(res.delta == doctest::Approx(h / 2));
  for (const auto& [lambda, m] : res.nu.terms) {
    CHECK(height_of(L, m.u) < eps);
    CHECK(height_of(L, m.v) < eps);
  }
}

TEST_CASE("make_zigzag: level-0 element is the reversed molecule") {
  MetricGraph g;
  g.n_vertices = 2;
  g.edges = {{0, 1, 1.0}};
  ZigzagFamily fam = make_zigzag(g, {{0, 1}}, 3);
  FreeElement nu0 = fam.nu(0, 0);
  FreeElement expect = molecule_element(fam.space(), 0, 1).scaled(-1.0);
  FreeElement gapel = nu0;
  gapel.axpy(-1.0, expect, fam.space().base());
  CHECK(gapel.empty());
}

TEST_CASE("make_zigzag: unit interval k=2 coefficient pattern") {
  MetricGraph g;
  g.n_vertices = 2;
  g.edges = {{0, 1, 1.0}};
  ZigzagFamily fam = make_zigzag(g, {{0, 1}}, 2);
  FreeElement mu = fam.mu(2);
  // (1/d) * (-1, +2, -2, +2, -1) along the five sample points; p_0 is the
  // base, whose Dirac is zero and is never stored.
  double expect[5] = {0, 2, -2, 2, -1};
  for (int j = 0; j <= 4; ++j)
    CHECK(mu.coeff(fam.sample(0, 2, j)) == doctest::Approx(expect[j]));
  CHECK(norm_value(fam.space(), mu) == doctest::Approx(1.0));
}

TEST_CASE("make_zigzag: star graph keeps ||y +- mu_k|| inside the ball") {
  MetricGraph star;
  star.n_vertices = 4;
  star.edges = {{1, 0, 1.0}, {2, 0, 1.0}, {3, 0, 1.0}};
  ZigzagFamily fam = make_zigzag(star, {{1, 0}, {2, 0}, {3, 0}}, 6);
  for (int k = 1; k <= 6; ++k) {
    FreeElement mu = fam.mu(k);
    FreeElement yp = fam.y();
    yp.axpy(1.0, mu, fam.space().base());
    FreeElement ym = fam.y();
    ym.axpy(-1.0, mu, fam.space().base());
    CHECK(norm_value(fam.space(), yp) <= 1.0 + 1e-9);
    CHECK(norm_value(fam.space(), ym) <= 1.0 + 1e-9);
  }
}

TEST_CASE("make_zigzag rejects unequal lengths and overlapping geodesics") {
  MetricGraph g;
  g.n_vertices = 3;
  g.edges = {{0, 1, 1.0}, {1, 2, 2.0}};
  CHECK_THROWS_WITH_AS(make_zigzag(g, {{0, 1}, {1, 2}}, 2),
                       doctest::Contains("lengths differ"), Error);

  // Two pairs whose geodesics share the middle stretch of a path.
  MetricGraph path;
  path.n_vertices = 4;
  path.edges = {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}};
  CHECK_THROWS_AS(make_zigzag(path, {{0, 2}, {1, 3}}, 2), Error);
}

TEST_CASE("make_zigzag routes the three theta branches disjointly") {
  MetricGraph theta;
  theta.n_vertices = 5;
  theta.edges = {{0, 2, 0.5}, {2, 1, 0.5}, {0, 3, 0.5}, {3, 1, 0.5}, {0, 4, 0.5}, {4, 1, 0.5}};
  ZigzagFamily fam = make_zigzag(theta, {{0, 1}, {0, 1}, {0, 1}}, 4);
  std::set<PointId> interiors;
  for (int i = 0; i < 3; ++i)
    for (size_t j = 1; j + 1 < fam.samples()[i].size(); ++j) {
      auto [it, fresh] = interiors.insert(fam.samples()[i][j]);
      CHECK(fresh);
    }
}

TEST_CASE("zigzag_witness: sawtooth on the interval") {
  MetricGraph g;
  g.n_vertices = 2;
  g.edges = {{0, 1, 1.0}};
  ZigzagFamily fam = make_zigzag(g, {{0, 1}}, 4);
  LipFunction w = zigzag_witness(fam, 2);
  for (int j = 0; j <= 4; ++j)
    CHECK(w(fam.sample(0, 2, j)) == doctest::Approx(j % 2 == 1 ? 0.25 : 0.0));
  CHECK(pairing(w, fam.mu(2)) == doctest::Approx(1.0));
  CHECK(w.lip() <= 1.0 + 1e-9);
}

TEST_CASE("zigzag_witness: separated segments work, close ones refuse") {
  // Two unit segments joined by a long bridge: comfortably separated.
  MetricGraph far;
  far.n_vertices = 4;
  far.edges = {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}};
  ZigzagFamily fam_far = make_zigzag(far, {{0, 1}, {2, 3}}, 3);
  LipFunction w = zigzag_witness(fam_far, 3);
  CHECK(pairing(w, fam_far.mu(3)) == doctest::Approx(1.0));

  // Bridge of length 1/16: needs 2^-k < 1/16, so k = 4 must refuse.
  MetricGraph close;
  close.n_vertices = 4;
  close.edges = {{0, 1, 1.0}, {1, 2, 1.0 / 16.0}, {2, 3, 1.0}};
  ZigzagFamily fam_close = make_zigzag(close, {{0, 1}, {2, 3}}, 5);
  CHECK_THROWS_WITH_AS(zigzag_witness(fam_close, 4), doctest::Contains("closer than"), Error);
  LipFunction w5 = zigzag_witness(fam_close, 5);
  CHECK(pairing(w5, fam_close.mu(5)) == doctest::Approx(1.0));
}

TEST_CASE("weak_null_trend: exact cancellation and the breakpoint bound") {
  MetricGraph g;
  g.n_vertices = 2;
  g.edges = {{0, 1, 1.0}};
  ZigzagFamily fam = make_zigzag(g, {{0, 1}}, 8);

  std::vector<TrendTest> tests;
  tests.push_back({"affine", [](const FiniteMetricSpace&, PointId, double t) { return 2 * t - 0.25; }, 0, 2.0});
  tests.push_back({"two_piece", [](const FiniteMetricSpace&, PointId, double t) { return std::abs(t - 1.0 / 3.0); }, 1, 1.0});

  auto rows = weak_null_trend(fam, tests, 1, 8);
  double tp_first = -1, tp_last = -1;
  for (const auto& row : rows) {
    if (row.test == "affine") CHECK(row.abs_pairing <= 1e-12);
    if (row.test == "two_piece") {
      CHECK(row.abs_pairing <= 4.0 * std::ldexp(1.0, -row.k) + 1e-12);
      if (row.k == 1) tp_first = row.abs_pairing;
      if (row.k == 8) tp_last = row.abs_pairing;
    }
  }
  CHECK(tp_last < tp_first);
}

TEST_CASE("weak_null_trend: distance test decays on the theta graph") {
  MetricGraph theta;
  theta.n_vertices = 5;
  theta.edges = {{0, 2, 0.5}, {2, 1, 0.5}, {0, 3, 0.5}, {3, 1, 0.5}, {0, 4, 0.5}, {4, 1, 0.5}};
  ZigzagFamily fam = make_zigzag(theta, {{0, 1}, {0, 1}, {0, 1}}, 10);
  // Target on another branch at an odd 1024th, so the induced breakpoint
  // falls off every coarser dyadic grid.
  PointId target = fam.samples()[1][341];
  std::vector<TrendTest> tests;
  tests.push_back({"dist_to_other_branch",
                   [target](const FiniteMetricSpace& s, PointId p, double) {
                     return s.dist(p, target);
                   },
                   -1, 0.0});
  auto rows = weak_null_trend(fam, tests, 4, 10);
  double at4 = 0, at10 = 0;
  for (const auto& row : rows) {
    if (row.geodesic != 0) continue;
    if (row.k == 4) at4 = row.abs_pairing;
    if (row.k == 10) at10 = row.abs_pairing;
    MESSAGE("dist trend k=", row.k, " |pairing|=", row.abs_pairing);
  }
  CHECK(at10 < at4 + 1e-12);
  CHECK(at10 <= 1e-2);
}

TEST_CASE("glue_strips: single strip stays 1-Lipschitz on its band") {
  FiniteMetricSpace L = build_ladder(LadderParams{3, 8, 8, {}, {}});
  std::vector<double> vals(L.size());
  for (int i = 0; i < L.size(); ++i) vals[i] = std::max(0.0, L.meta(i).b - 0.25);
  LipFunction f1(L, std::move(vals));

  StripSchedule sched{{0.5, 0.125}, {f1}};
  LipFunction glued = glue_strips(L, sched);
  for (int i = 0; i < L.size(); ++i) {
    double h = L.meta(i).b;
    if (h >= 0.25 && h < 0.5) CHECK(glued(i) == doctest::Approx(f1(i)));
  }
  for (int i = 0; i < L.size(); ++i)
    for (int j = 0; j < L.size(); ++j) {
      if (i == j) continue;
      double hi = L.meta(i).b, hj = L.meta(j).b;
      bool in_strip = hi >= 0.25 && hi < 0.5 && hj >= 0.25 && hj < 0.5;
      if (in_strip) CHECK(std::abs(glued(i) - glued(j)) <= L.dist(i, j) + 1e-12);
    }
}

TEST_CASE("glue_strips: two strips obey the 3d cross bound") {
  FiniteMetricSpace L = build_ladder(LadderParams{4, 8, 16, {}, {}});
  auto band_fn = [&](double floor) {
    std::vector<double> vals(L.size());
    for (int i = 0; i < L.size(); ++i) vals[i] = std::max(0.0, L.meta(i).b - floor);
    return LipFunction(L, std::move(vals));
  };
  StripSchedule sched{{0.5, 0.125, 1.0 / 32.0}, {band_fn(0.25), band_fn(0.0625)}};
  LipFunction glued = glue_strips(L, sched);
  CHECK(glued.lip() <= 3.0 + 1e-9);
  for (int i = 0; i < L.size(); ++i)
    for (int j = 0; j < L.size(); ++j)
      if (i != j) CHECK(std::abs(glued(i) - glued(j)) <= 3.0 * L.dist(i, j) + 1e-9);

  StripSchedule bad{{0.5, 1.0 / 3.0}, {band_fn(0.25)}};
  CHECK_THROWS_WITH_AS(glue_strips(L, bad), doctest::Contains("delta_i > 2 delta_{i+1}"), Error);

  StripSchedule not_vanishing{{0.5, 0.125}, {band_fn(0.0)}};
  CHECK_THROWS_WITH_AS(glue_strips(L, not_vanishing), doctest::Contains("vanish"), Error);
}

TEST_CASE("non-WASQ pipeline: small instance") {
  NonWasqResult res = run_nonwasq_certificate(3, 3);
  CHECK(res.lip_glued <= 3.0 + 1e-9);
  for (size_t i = 0; i < res.strips.size(); ++i) {
    const auto& s = res.strips[i];
    CHECK(s.nu_norm == doctest::Approx(1.0));
    CHECK(s.pairing_glued > s.bound - s.delta);
    CHECK(s.g_mxy < 4.0 * s.delta);
  }
  CHECK(res.normalized_min > 0.0);
}
