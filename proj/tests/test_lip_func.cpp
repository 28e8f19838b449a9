#include <cmath>
#include <map>

#include "doctest.h"
#include "lipfree/free_space.hpp"
#include "lipfree/ladder.hpp"
#include "lipfree/metric_graph.hpp"
#include "lipfree/rng.hpp"

using namespace lipfree;

namespace {

FiniteMetricSpace small_ladder() {
  return build_ladder(LadderParams{3, 8, 8, {}, {}});
}

}  // namespace

TEST_CASE("lip_constant: constants, projections, f_xy") {
  FiniteMetricSpace L = small_ladder();
  CHECK(lip_constant(L, std::vector<double>(L.size(), 0.0)) == 0.0);

  auto [pi1, pi2] = projections(L);
  CHECK(pi1.lip() == doctest::Approx(1.0));
  CHECK(pi2.lip() == doctest::Approx(1.0));
  CHECK(pi1(ladder_point(L, 0.25, 0.25)) == doctest::Approx(0.25));

  PointId y = ladder_point(L, 1.0, 0.0);
  LipFunction fxy = f_xy_builder(L, L.base(), y);
  CHECK(fxy.lip() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("projections reject non-ladder spaces") {
  MetricGraph g;
  g.n_vertices = 2;
  g.edges = {{0, 1, 1.0}};
  FiniteMetricSpace S = derive_space(g);
  CHECK_THROWS_AS(projections(S), Error);
}

TEST_CASE("pi_2 pairs to zero with same-height molecules") {
  FiniteMetricSpace L = small_ladder();
  auto [pi1, pi2] = projections(L);
  PointId u = ladder_point(L, 0.25, 0.25), v = ladder_point(L, 0.875, 0.25);
  CHECK(pairing(pi2, molecule_element(L, u, v)) == doctest::Approx(0.0));
}

TEST_CASE("mcshane: identity on total data, definition on two points") {
  FiniteMetricSpace L = small_ladder();
  Rng rng(17);

  // Total 1-Lipschitz data extends to itself.
  std::vector<double> vals(L.size());
  for (int i = 0; i < L.size(); ++i) vals[i] = 0.5 * L.dist(i, L.base());
  std::map<PointId, double> total;
  for (int i = 0; i < L.size(); ++i) total[i] = vals[i];
  LipFunction ext = mcshane_extend(L, total, 1.0);
  for (int i = 0; i < L.size(); ++i) CHECK(ext(i) == doctest::Approx(vals[i]));

  // Two-point data: the formula is forced.
  PointId xpt = ladder_point(L, 1.0, 0.5);
  std::map<PointId, double> partial{{L.base(), 0.0}, {xpt, L.dist(L.base(), xpt)}};
  LipFunction f = mcshane_extend(L, partial, 1.0);
  CHECK(f.lip() <= 1.0 + 1e-12);
  CHECK(f(xpt) == doctest::Approx(L.dist(L.base(), xpt)));
  for (int p = 0; p < L.size(); ++p) {
    double expect = std::min(L.dist(p, L.base()), partial[xpt] + L.dist(p, xpt));
    CHECK(f(p) == doctest::Approx(expect));
  }
}

TEST_CASE("mcshane: idempotence and domination over the lower extension") {
  FiniteMetricSpace L = small_ladder();
  Rng rng(23);
  for (int t = 0; t < 25; ++t) {
    // Random partial data made L-Lipschitz by scaling.
    int k = rng.uniform_int(2, 6);
    std::map<PointId, double> partial{{L.base(), 0.0}};
    while (static_cast<int>(partial.size()) < k)
      partial[rng.uniform_int(0, L.size() - 1)] = rng.uniform(-1, 1);
    partial[L.base()] = 0.0;
    double need = 0;
    for (auto& [p, vp] : partial)
      for (auto& [q, vq] : partial)
        if (p != q) need = std::max(need, std::abs(vp - vq) / L.dist(p, q));
    double Lc = std::max(1.0, need * 1.0000001);

    LipFunction up = mcshane_extend(L, partial, Lc);
    LipFunction lo = mcshane_extend_lower(L, partial, Lc);

    // Idempotence: extending the total result changes nothing.
    std::map<PointId, double> total;
    for (int i = 0; i < L.size(); ++i) total[i] = up(i);
    LipFunction again = mcshane_extend(L, total, Lc);
    for (int i = 0; i < L.size(); ++i) CHECK(again(i) == doctest::Approx(up(i)));

    // Domination: the lower extension never exceeds the upper one.
    for (int i = 0; i < L.size(); ++i) CHECK(lo(i) <= up(i) + 1e-12);
    for (auto& [p, v] : partial) {
      CHECK(up(p) == doctest::Approx(v));
      CHECK(lo(p) == doctest::Approx(v));
    }
  }
}

TEST_CASE("mcshane rejects data violating the bound, naming the pair") {
  FiniteMetricSpace L = small_ladder();
  PointId u = ladder_point(L, 0.0, 0.5), v = ladder_point(L, 1.0, 0.5);
  std::map<PointId, double> partial{{L.base(), 0.0}, {u, 0.0}, {v, 10.0}};
  CHECK_THROWS_WITH_AS(mcshane_extend(L, partial, 1.0),
                       doctest::Contains("violates Lipschitz bound"), Error);
}

TEST_CASE("lip subadditivity on random pairs") {
  FiniteMetricSpace L = small_ladder();
  Rng rng(37);
  for (int t = 0; t < 15; ++t) {
    std::vector<double> a(L.size()), b(L.size());
    for (int i = 0; i < L.size(); ++i) {
      a[i] = rng.uniform(-1, 1);
      b[i] = rng.uniform(-1, 1);
    }
    a[L.base()] = b[L.base()] = 0;
    std::vector<double> s(L.size());
    for (int i = 0; i < L.size(); ++i) s[i] = a[i] + b[i];
    CHECK(lip_constant(L, s) <= lip_constant(L, a) + lip_constant(L, b) + 1e-12);
  }
}

TEST_CASE("f_xy: endpoint values, unit pairing, high-point contraction") {
  FiniteMetricSpace L = small_ladder();
  PointId x = L.base(), y = ladder_point(L, 1.0, 0.0);
  LipFunction fxy = f_xy_builder(L, x, y);
  double dxy = L.dist(x, y);
  // Values are anchored to 0 at the base; the formula's endpoint values
  // d/2 and -d/2 survive as differences from f_xy(x).
  CHECK(fxy(x) - fxy(y) == doctest::Approx(dxy));
  for (int p = 0; p < L.size(); ++p) {
    double raw = 0.5 * dxy * (L.dist(y, p) - L.dist(x, p)) / (L.dist(x, p) + L.dist(y, p));
    CHECK(fxy(p) - fxy(x) == doctest::Approx(raw - dxy / 2));
  }
  CHECK(pairing(fxy, molecule_element(L, x, y)) == doctest::Approx(1.0));

  // Above height eps/16 the function contracts by 1/(1 + eps/8).
  double eps = 0.5;
  for (int p = 0; p < L.size(); ++p) {
    if (L.meta(p).b < eps / 16) continue;
    for (int q = 0; q < L.size(); ++q) {
      if (q == p) continue;
      CHECK(std::abs(fxy(p) - fxy(q)) <= L.dist(p, q) / (1 + eps / 8) + 1e-12);
    }
  }
  CHECK_THROWS_AS(f_xy_builder(L, x, x), Error);
}

TEST_CASE("bump: peak value, support, mesh-limited constant") {
  // Dense path discretization: lip approaches 1 from below.
  MetricGraph g;
  int n = 33;
  g.n_vertices = n;
  double h = 1.0 / 32.0;
  for (int i = 0; i + 1 < n; ++i) g.edges.push_back({i, i + 1, h});
  FiniteMetricSpace S = derive_space(g);

  PointId center = 16;
  double r = 0.25;
  BumpResult b = bump(S, center, r);
  CHECK_FALSE(b.base_inside);
  CHECK(b.f(center) == doctest::Approx(r));
  for (int p = 0; p < S.size(); ++p)
    if (S.dist(p, center) >= r) CHECK(b.f(p) == 0.0);
  CHECK(b.f.lip() <= 1.0 + 1e-12);
  CHECK(b.f.lip() >= 1.0 - h / r - 1e-12);

  // A bump swallowing the base is re-anchored and flagged.
  BumpResult near_base = bump(S, 1, 0.5);
  CHECK(near_base.base_inside);
  CHECK(near_base.f(S.base()) == 0.0);

  CHECK_THROWS_AS(bump(S, center, -1.0), Error);
}
