#include "lipfree/ssd2p.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace lipfree {

Ssd2pInstance build_instance(const FiniteMetricSpace& space, std::vector<PointId> anchors,
                             double d_param, double eps, const Ssd2pOptions& opts) {
  if (!(d_param > 0 && d_param <= 1))
    throw Error(ErrorKind::Precondition, "build_instance: d must lie in (0, 1]");
  if (!(eps > 0 && eps < d_param / 6.0))
    throw Error(ErrorKind::Precondition, "build_instance: eps must lie in (0, d/6)");
  if (anchors.empty()) throw Error(ErrorKind::Precondition, "build_instance: no anchors");
  int n = static_cast<int>(anchors.size());
  {
    std::set<PointId> seen;
    for (PointId p : anchors) {
      space.check_id(p, "build_instance");
      if (p == space.base())
        throw Error(ErrorKind::Precondition, "build_instance: anchor equals the base point");
      if (!seen.insert(p).second)
        throw Error(ErrorKind::Precondition, "build_instance: anchors must be distinct");
    }
  }
  if (opts.enforce_anchor_count && 4.0 / n > eps)
    throw Error(ErrorKind::Precondition, "build_instance: 4/n <= eps violated");

  double min_pair = std::numeric_limits<double>::infinity();
  std::vector<PointId> with_base = anchors;
  with_base.push_back(space.base());
  for (size_t i = 0; i < with_base.size(); ++i)
    for (size_t j = i + 1; j < with_base.size(); ++j)
      min_pair = std::min(min_pair, space.dist(with_base[i], with_base[j]));

  Ssd2pInstance inst;
  inst.d_param = d_param;
  inst.eps = eps;
  inst.n = n;
  inst.anchors = anchors;
  inst.R = 0.25 * min_pair;
  inst.r = eps * inst.R / 2.0;

  // Disjointness: centers are >= 4R apart, so the closed R-balls cannot meet.
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (!(space.dist(anchors[i], anchors[j]) > 2.0 * inst.R))
        throw Error(ErrorKind::Verification, "build_instance: R-balls are not disjoint");

  for (int i = 0; i < n; ++i) {
    // Closed balls with a metric-tolerance belt so summed path distances that
    // land on the boundary stay inside.
    std::vector<PointId> ball, bumpset;
    for (int p = 0; p < space.size(); ++p) {
      double d = space.dist(p, anchors[i]);
      if (d <= inst.R + kMetricTol) ball.push_back(p);
      if (d <= inst.r + kMetricTol) bumpset.push_back(p);
    }
    inst.ball_points.push_back(std::move(ball));
    inst.bump_points.push_back(std::move(bumpset));

    BumpResult b = bump(space, anchors[i], inst.r);
    if (b.base_inside)
      throw Error(ErrorKind::Verification, "build_instance: bump overlaps the base point");
    double norm_f = b.f.lip();

    // The slice must be witnessed by a molecule inside the bump.
    Molecule best{-1, -1};
    double best_pair = -std::numeric_limits<double>::infinity();
    const auto& cpts = inst.bump_points.back();
    for (PointId u : cpts)
      for (PointId v : cpts) {
        if (u == v) continue;
        double pr = (b.f(u) - b.f(v)) / space.dist(u, v);
        if (pr > best_pair) {
          best_pair = pr;
          best = {u, v};
        }
      }
    if (best.u < 0 || !(best_pair > norm_f - eps)) {
      std::ostringstream os;
      os << "build_instance: slice " << i
         << " has no molecule witness inside the bump (discretization too coarse near anchor "
         << anchors[i] << ")";
      throw Error(ErrorKind::Resolution, os.str());
    }
    inst.slices.push_back({std::move(b.f), eps, norm_f, best});
  }
  return inst;
}

LipFunction glue_g(const FiniteMetricSpace& space, const Ssd2pInstance& inst, int i,
                   const LipFunction& f) {
  if (i < 0 || i >= inst.n) throw Error(ErrorKind::Structural, "glue_g: slice index out of range");
  if (f.space() != &space)
    throw Error(ErrorKind::Structural, "glue_g: f lives on a different space");
  if (f.lip() > 1.0 - inst.eps + kDualityTol)
    throw Error(ErrorKind::Precondition, "glue_g: ||f|| must not exceed 1 - eps");

  const LipFunction& fi = inst.slices[i].f;
  PointId anchor = inst.anchors[i];
  double shift = f(anchor) - fi(anchor);

  std::map<PointId, double> partial;
  std::set<PointId> ball(inst.ball_points[i].begin(), inst.ball_points[i].end());
  for (int p = 0; p < space.size(); ++p)
    if (!ball.count(p)) partial[p] = f(p);
  for (PointId p : inst.bump_points[i]) partial[p] = fi(p) + shift;

  LipFunction g = mcshane_extend(space, partial, 1.0, 1e-10);
  if (g.lip() > 1.0 + kDualityTol)
    throw Error(ErrorKind::Verification, "glue_g: glued function exceeded Lipschitz bound 1");
  return g;
}

RefutationReport refute(const FiniteMetricSpace& space, const Ssd2pInstance& inst,
                        const FreeElement& y, const std::vector<FreeElement>& x_per_slice) {
  if (!x_per_slice.empty() && static_cast<int>(x_per_slice.size()) != inst.n)
    throw Error(ErrorKind::Structural, "refute: need one x per slice (or none)");

  MolecularDecomposition ydec = decompose(space, y);
  double y_norm = ydec.sum_lambda();
  if (y_norm > 1.0 + kDualityTol)
    throw Error(ErrorKind::Precondition, "refute: y lies outside the unit ball");
  if (y_norm < 1.0 - inst.eps - kDualityTol)
    throw Error(ErrorKind::Precondition, "refute: ||y|| >= 1 - eps required");

  // Weighted pigeonhole over the anchors: each endpoint lies in at most one
  // ball, so some slice carries at most 2||y||/n of the weight.
  RefutationReport rep;
  rep.j_bound = 2.0 * y_norm / inst.n;
  int best_i = -1;
  double best_mass = std::numeric_limits<double>::infinity();
  for (int i = 0; i < inst.n; ++i) {
    std::set<PointId> ball(inst.ball_points[i].begin(), inst.ball_points[i].end());
    double mass = 0;
    for (const auto& [lambda, m] : ydec.terms)
      if (ball.count(m.u) || ball.count(m.v)) mass += lambda;
    if (mass < best_mass) {
      best_mass = mass;
      best_i = i;
    }
  }
  rep.index = best_i;
  rep.weighted_j_mass = best_mass;
  if (best_mass > rep.j_bound + kDualityTol)
    throw Error(ErrorKind::Verification, "refute: pigeonhole bound failed");

  const SliceSpec& slice = inst.slices[best_i];
  const auto& cpts = inst.bump_points[best_i];
  std::set<PointId> bump_set(cpts.begin(), cpts.end());

  FreeElement x = x_per_slice.empty()
                      ? molecule_element(space, slice.witness.u, slice.witness.v)
                      : x_per_slice[best_i];
  double fx = pairing(slice.f, x);
  if (!(fx > slice.norm_f - slice.eps) || norm_value(space, x) > 1.0 + kDualityTol)
    throw Error(ErrorKind::Precondition, "refute: x does not lie in the selected slice");

  // Inner approximant: x itself when already supported in C_i, otherwise the
  // closest slice molecule with both endpoints in C_i.
  bool x_inside = true;
  for (const auto& [p, c] : x.coeffs())
    if (!bump_set.count(p)) x_inside = false;
  if (x_inside) {
    rep.z = x;
    rep.dist_x_z = 0.0;
  } else {
    double best_d = std::numeric_limits<double>::infinity();
    FreeElement best_z;
    for (PointId u : cpts)
      for (PointId v : cpts) {
        if (u == v) continue;
        double pr = (slice.f(u) - slice.f(v)) / space.dist(u, v);
        if (!(pr > slice.norm_f - slice.eps)) continue;
        FreeElement cand = molecule_element(space, u, v);
        FreeElement gap = x;
        gap.axpy(-1.0, cand, space.base());
        double dist = norm_value(space, gap);
        if (dist < best_d) {
          best_d = dist;
          best_z = cand;
        }
      }
    if (!(best_d < 2.0 * inst.eps))
      throw Error(ErrorKind::Resolution,
                  "refute: no slice molecule within 2 eps of x inside the bump; refine the space");
    rep.z = best_z;
    rep.dist_x_z = best_d;
  }

  // Dual witness of y scaled to norm 1 - eps, then glued across the ball.
  NormCertificate ycert = norm(space, y);
  LipFunction f = ycert.potentials.scaled(1.0 - inst.eps);
  LipFunction g = glue_g(space, inst, best_i, f);

  double fy = pairing(f, y), gy = pairing(g, y), gz = pairing(g, rep.z);
  rep.fg_gap = fy - gy;
  rep.fg_bound = 4.0 / inst.n;
  rep.d_g_y = inst.d_param * gy;
  rep.d_g_y_bound = inst.d_param - 3.0 * inst.eps;
  rep.chain_value = gz + rep.d_g_y;
  rep.chain_bound = slice.norm_f + inst.d_param - 4.0 * inst.eps;

  FreeElement z_dy = rep.z;
  z_dy.axpy(inst.d_param, y, space.base());
  rep.norm_z_dy = norm_value(space, z_dy);

  FreeElement x_dy = x;
  x_dy.axpy(inst.d_param, y, space.base());
  rep.norm_x_dy = norm_value(space, x_dy);

  rep.final_bound = slice.norm_f + inst.d_param - 6.0 * inst.eps;
  rep.verdict = rep.norm_x_dy > 1.0;

  if (rep.fg_gap > rep.fg_bound + kDualityTol)
    throw Error(ErrorKind::Verification, "refute: (f-g)(y) exceeded 4/n");
  if (rep.norm_z_dy < rep.chain_value - 1e-6)
    throw Error(ErrorKind::Verification, "refute: engine norm fell below the analytic chain");
  return rep;
}

}  // namespace lipfree
