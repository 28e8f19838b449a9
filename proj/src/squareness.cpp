#include "lipfree/squareness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "lipfree/ladder.hpp"

namespace lipfree {

std::vector<Molecule> mol_window_members(const FiniteMetricSpace& ladder,
                                         const MolWindow& window) {
  if (!is_ladder(ladder))
    throw Error(ErrorKind::Precondition, "mol_window_members: expected a ladder space");
  if (!(window.delta > 0) || !(window.eps > window.delta))
    throw Error(ErrorKind::Precondition, "mol_window_members: need 0 < delta < eps");
  std::vector<PointId> inside;
  for (int p = 0; p < ladder.size(); ++p) {
    double h = ladder.meta(p).b;
    if (h > window.delta && h < window.eps) inside.push_back(p);
  }
  std::vector<Molecule> out;
  for (PointId u : inside)
    for (PointId v : inside)
      if (u != v) out.push_back({u, v});
  return out;
}

LipFunction flatten(const FiniteMetricSpace& ladder, const MolecularDecomposition& nu,
                    const LipFunction& g, double eps, double delta) {
  if (!is_ladder(ladder)) throw Error(ErrorKind::Precondition, "flatten: expected a ladder space");
  if (g.space() != &ladder)
    throw Error(ErrorKind::Structural, "flatten: g lives on a different space");
  if (!(eps > 0) || !(delta > 0))
    throw Error(ErrorKind::Precondition, "flatten: eps and delta must be positive");
  if (nu.terms.empty()) throw Error(ErrorKind::Precondition, "flatten: empty decomposition");

  PointId x = ladder.base();
  PointId y = ladder_point(ladder, 1.0, 0.0);
  PointId u = ladder_point(ladder, 0.0, delta);
  PointId v = ladder_point(ladder, 1.0, delta);

  for (const auto& [lambda, mol] : nu.terms) {
    if (height_of(ladder, mol.u) <= delta || height_of(ladder, mol.v) <= delta) {
      std::ostringstream os;
      os << "flatten: hypothesis failed: nu has an endpoint at height <= delta ("
         << ladder.meta(mol.u).label << " or " << ladder.meta(mol.v).label << ")";
      throw Error(ErrorKind::Precondition, os.str());
    }
  }

  FreeElement m_xy = molecule_element(ladder, x, y);
  double gxy = pairing(g, m_xy);
  if (!(std::abs(gxy) < eps)) {
    std::ostringstream os;
    os << "flatten: hypothesis failed: |<g, m_xy>| = " << std::abs(gxy) << " >= eps = " << eps;
    throw Error(ErrorKind::Precondition, os.str());
  }

  double sum_lambda = nu.sum_lambda();
  FreeElement elem = as_element(ladder, nu);
  double gnu = pairing(g, elem);
  if (gnu < sum_lambda - kDualityTol) {
    std::ostringstream os;
    os << "flatten: hypothesis failed: g does not norm nu (<g,nu> = " << gnu
       << " < sum lambda = " << sum_lambda << ")";
    throw Error(ErrorKind::Precondition, os.str());
  }

  // The cited distance collapses to twice the window height on the ladder.
  FreeElement m_uv = molecule_element(ladder, u, v);
  FreeElement diff = m_xy;
  diff.axpy(-1.0, m_uv, ladder.base());
  double mm = norm_value(ladder, diff);
  if (std::abs(mm - 2.0 * delta) > kDualityTol)
    throw Error(ErrorKind::Verification,
                "flatten: ||m_xy - m_uv|| deviates from 2*delta on this space");

  double t = pairing(g, m_uv);
  if (!(std::abs(t) < eps + 2.0 * delta + kDualityTol))
    throw Error(ErrorKind::Verification, "flatten: |<g, m_uv>| exceeds eps + 2 delta");

  int n = ladder.size();
  std::vector<double> h(n);
  for (int p = 0; p < n; ++p) h[p] = g(p) + t * ladder.meta(p).a;
  double hn = lip_constant(ladder, h);
  if (hn < 1e-12) throw Error(ErrorKind::Precondition, "flatten: degenerate h = g + <g,m_uv> pi_1");

  double hu = h[u];
  std::vector<double> f(n);
  for (int p = 0; p < n; ++p)
    f[p] = (ladder.meta(p).b <= delta) ? 0.0 : (h[p] - hu) / hn;

  LipFunction out(ladder, std::move(f));
  if (out.lip() > 1.0 + kDualityTol)
    throw Error(ErrorKind::Verification, "flatten: result is not 1-Lipschitz");
  return out;
}

MoleculeFilterResult molecule_filter(const FiniteMetricSpace& ladder, const FreeElement& mu,
                                     double eps) {
  if (!is_ladder(ladder))
    throw Error(ErrorKind::Precondition, "molecule_filter: expected a ladder space");
  if (!(eps > 0 && eps < 1))
    throw Error(ErrorKind::Precondition, "molecule_filter: eps must lie in (0,1)");

  PointId x = ladder.base();
  PointId y = ladder_point(ladder, 1.0, 0.0);
  FreeElement m_xy = molecule_element(ladder, x, y);
  double budget = eps * eps / 64.0;

  FreeElement plus = m_xy, minus = m_xy;
  plus.axpy(1.0, mu, x);
  minus.axpy(-1.0, mu, x);
  double n_plus = norm_value(ladder, plus);
  double n_minus = norm_value(ladder, minus);
  double n_mu = norm_value(ladder, mu);
  auto fail = [&](const std::string& what, double got, const std::string& rel, double bound) {
    std::ostringstream os;
    os << "molecule_filter: hypothesis failed: " << what << " = " << got << " " << rel << " "
       << bound;
    throw Error(ErrorKind::Precondition, os.str());
  };
  if (!(n_plus < 1.0 + budget)) fail("||m_xy + mu||", n_plus, ">=", 1.0 + budget);
  if (!(n_minus < 1.0 + budget)) fail("||m_xy - mu||", n_minus, ">=", 1.0 + budget);
  if (!(n_mu > 1.0 - budget)) fail("||mu||", n_mu, "<=", 1.0 - budget);
  if (n_mu > 1.0 + kDualityTol) fail("||mu||", n_mu, ">", 1.0);

  MolecularDecomposition dec = decompose(ladder, mu);
  const double thr = eps / 16.0;

  MoleculeFilterResult res;
  res.eps = eps;
  res.j_mass = 0;
  res.split_mismatch = 0;

  auto classify = [&](double lambda, Molecule m) {
    double hu = height_of(ladder, m.u), hv = height_of(ladder, m.v);
    if (std::min(hu, hv) >= thr)
      res.j_mass += lambda;
    else
      res.nu.terms.push_back({lambda, m});
  };

  for (const auto& [lambda, m] : dec.terms) {
    double hu = height_of(ladder, m.u), hv = height_of(ladder, m.v);
    double lo = std::min(hu, hv), hi = std::max(hu, hv);
    if (lo >= thr || hi < thr) {
      classify(lambda, m);
      continue;
    }
    // Crossing molecule: split at a segment point of height eps/16 when the
    // space has one; otherwise keep or drop whole, widening the tolerance.
    PointId split = -1;
    double best_gap = 0;
    for (PointId p : segment(ladder, m.u, m.v, 1e-9)) {
      if (p == m.u || p == m.v) continue;
      double gap = std::abs(height_of(ladder, p) - thr);
      if (split < 0 || gap < best_gap) {
        split = p;
        best_gap = gap;
      }
    }
    if (split >= 0) {
      double d_up = ladder.dist(m.u, split), d_pv = ladder.dist(split, m.v);
      double share = d_up + d_pv;
      classify(lambda * d_up / share, Molecule{m.u, split});
      classify(lambda * d_pv / share, Molecule{split, m.v});
      res.split_mismatch = std::max(res.split_mismatch, best_gap);
    } else if (hi < eps) {
      res.nu.terms.push_back({lambda, m});
      res.split_mismatch = std::max(res.split_mismatch, hi - thr);
    } else {
      res.j_mass += lambda;
      res.split_mismatch = std::max(res.split_mismatch, hi - thr);
    }
  }

  if (res.j_mass > 15.0 * eps / 16.0) {
    std::ostringstream os;
    os << "molecule_filter: contradiction branch: mass " << res.j_mass
       << " at heights >= eps/16 exceeds 15 eps/16 = " << 15.0 * eps / 16.0
       << " (input not nearly-square against m_xy, or discretization too coarse)";
    throw ContradictionError(os.str(), res.j_mass);
  }
  if (res.nu.terms.empty())
    throw ContradictionError("molecule_filter: nothing remains below eps/16", res.j_mass);

  double min_h = 1.0, max_h = 0.0;
  for (const auto& [lambda, m] : res.nu.terms) {
    min_h = std::min({min_h, height_of(ladder, m.u), height_of(ladder, m.v)});
    max_h = std::max({max_h, height_of(ladder, m.u), height_of(ladder, m.v)});
  }
  if (min_h <= 1e-15)
    throw Error(ErrorKind::Resolution,
                "molecule_filter: decomposition touches height 0; no positive window exists "
                "(refine the space so low flows avoid the corners)");
  if (max_h >= eps)
    throw Error(ErrorKind::Verification, "molecule_filter: a kept endpoint sits at height >= eps");
  res.delta = 0.5 * min_h;

  FreeElement recon = as_element(ladder, res.nu);
  FreeElement gap = mu;
  gap.axpy(-1.0, recon, x);
  res.distance = norm_value(ladder, gap);
  if (!(res.distance < eps))
    throw Error(ErrorKind::Verification, "molecule_filter: ||mu - nu|| >= eps after filtering");
  return res;
}

PointId ZigzagFamily::sample(int i, int k, int j) const {
  int stride = 1 << (k_max_ - k);
  return samples_[i][static_cast<size_t>(j) * stride];
}

MolecularDecomposition ZigzagFamily::nu_decomposition(int i, int k) const {
  if (i < 0 || i >= n_geodesics())
    throw Error(ErrorKind::Structural, "zigzag: geodesic index out of range");
  if (k < 0 || k > k_max_)
    throw Error(ErrorKind::Structural, "zigzag: level must lie in [0, k_max]");
  MolecularDecomposition dec;
  double w = std::ldexp(1.0, -k);
  long long segs = 1LL << k;
  for (long long j = 1; j <= segs; ++j) {
    PointId a = sample(i, k, static_cast<int>(j - 1));
    PointId b = sample(i, k, static_cast<int>(j));
    if (j % 2 == 1)
      dec.terms.push_back({w, Molecule{b, a}});  // odd j carries -m_{ab} = m_{ba}
    else
      dec.terms.push_back({w, Molecule{a, b}});
  }
  return dec;
}

FreeElement ZigzagFamily::nu(int i, int k) const {
  return as_element(*space_, nu_decomposition(i, k));
}

FreeElement ZigzagFamily::mu(int k) const {
  FreeElement out;
  double w = 1.0 / n_geodesics();
  for (int i = 0; i < n_geodesics(); ++i) out.axpy(w, nu(i, k), space_->base());
  return out;
}

ZigzagFamily make_zigzag(const MetricGraph& g, const std::vector<std::pair<int, int>>& pairs,
                         int k_max) {
  if (pairs.empty()) throw Error(ErrorKind::Precondition, "make_zigzag: no pairs given");
  if (k_max < 0) throw Error(ErrorKind::Precondition, "make_zigzag: k_max must be >= 0");

  GeodesicNet net(g);
  ZigzagFamily fam;
  fam.k_max_ = k_max;
  double d0 = -1;
  for (const auto& [u, v] : pairs) {
    double d = net.vertex_distance(u, v);
    if (d0 < 0)
      d0 = d;
    else if (std::abs(d - d0) > kMetricTol) {
      std::ostringstream os;
      os << "make_zigzag: geodesic lengths differ (" << d0 << " vs " << d << ")";
      throw Error(ErrorKind::Precondition, os.str());
    }
    fam.samples_.push_back(net.route_and_sample(u, v, k_max, /*block=*/true));
    fam.endpoints_.push_back({u, v});
  }
  fam.d_ = d0;

  // Images may meet only in endpoints.
  std::set<PointId> endpoint_ids;
  for (auto& [u, v] : fam.endpoints_) {
    endpoint_ids.insert(u);
    endpoint_ids.insert(v);
  }
  std::map<PointId, int> owner;
  for (int i = 0; i < fam.n_geodesics(); ++i)
    for (PointId p : fam.samples_[i]) {
      auto [it, inserted] = owner.emplace(p, i);
      if (!inserted && it->second != i && !endpoint_ids.count(p))
        throw Error(ErrorKind::Precondition,
                    "make_zigzag: geodesics overlap beyond their endpoints");
    }

  fam.space_ = std::make_shared<const FiniteMetricSpace>(net.to_space());

  double wy = 1.0 / static_cast<double>(pairs.size());
  for (auto& [u, v] : fam.endpoints_)
    fam.y_.axpy(wy, molecule_element(*fam.space_, u, v), fam.space_->base());

  // Subdivision exactness at the deepest level certifies the sampling.
  for (int i = 0; i < fam.n_geodesics(); ++i) {
    FreeElement resid = molecule_element(*fam.space_, fam.endpoints_[i].first,
                                         fam.endpoints_[i].second);
    MolecularDecomposition chain;
    long long segs = 1LL << k_max;
    for (long long j = 1; j <= segs; ++j)
      chain.terms.push_back({std::ldexp(1.0, -k_max),
                             Molecule{fam.samples_[i][j - 1], fam.samples_[i][j]}});
    resid.axpy(-1.0, as_element(*fam.space_, chain), fam.space_->base());
    if (norm_value(*fam.space_, resid) > kDualityTol)
      throw Error(ErrorKind::Verification, "make_zigzag: subdivision identity failed");
  }
  return fam;
}

LipFunction zigzag_witness(const ZigzagFamily& family, int k) {
  const FiniteMetricSpace& space = family.space();
  if (k < 0 || k > family.k_max())
    throw Error(ErrorKind::Structural, "zigzag_witness: level out of range");
  double d = family.common_length();
  double step = std::ldexp(d, -k);

  // Separated images are required only for geodesic pairs that do not touch.
  int n = family.n_geodesics();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const auto &si = family.samples()[i], &sj = family.samples()[j];
      bool touch = false;
      std::set<PointId> ids(si.begin(), si.end());
      for (PointId p : sj)
        if (ids.count(p)) {
          touch = true;
          break;
        }
      if (touch) continue;
      double md = std::numeric_limits<double>::infinity();
      for (PointId p : si)
        for (PointId q : sj) md = std::min(md, space.dist(p, q));
      if (!(md > step)) {
        std::ostringstream os;
        os << "zigzag_witness: geodesics " << i << " and " << j
           << " are closer than 2^-k d = " << step << " (distance " << md << ")";
        throw Error(ErrorKind::Precondition, os.str());
      }
    }

  std::map<PointId, double> partial;
  long long segs = 1LL << k;
  for (int i = 0; i < n; ++i)
    for (long long j = 0; j <= segs; ++j) {
      PointId p = family.sample(i, k, static_cast<int>(j));
      double val = (j % 2 == 1) ? step : 0.0;
      auto [it, inserted] = partial.emplace(p, val);
      if (!inserted && std::abs(it->second - val) > 1e-12)
        throw Error(ErrorKind::Precondition,
                    "zigzag_witness: conflicting values at a shared sample point");
    }

  LipFunction f = mcshane_extend(space, partial, 1.0, 1e-10);
  if (f.lip() > 1.0 + kDualityTol)
    throw Error(ErrorKind::Verification, "zigzag_witness: extension exceeded Lipschitz bound");
  double pr = pairing(f, family.mu(k));
  if (std::abs(pr - 1.0) > kDualityTol)
    throw Error(ErrorKind::Verification, "zigzag_witness: pairing with mu_k is not 1");
  return f;
}

std::vector<TrendRow> weak_null_trend(const ZigzagFamily& family,
                                      const std::vector<TrendTest>& tests, int k_lo, int k_hi) {
  if (k_lo < 0 || k_hi > family.k_max() || k_lo > k_hi)
    throw Error(ErrorKind::Structural, "weak_null_trend: bad level range");
  const FiniteMetricSpace& space = family.space();
  std::vector<TrendRow> rows;
  long long deepest = 1LL << family.k_max();
  for (const auto& test : tests) {
    for (int i = 0; i < family.n_geodesics(); ++i) {
      std::vector<double> vals(deepest + 1);
      for (long long idx = 0; idx <= deepest; ++idx) {
        double t = static_cast<double>(idx) / static_cast<double>(deepest);
        vals[idx] = test.eval(space, family.samples()[i][idx], t);
      }
      for (int k = k_lo; k <= k_hi; ++k) {
        long long stride = deepest >> k;
        double acc = 0;
        double scale = std::ldexp(1.0, -k);
        long long segs = 1LL << k;
        for (long long j = 1; j <= segs; ++j) {
          PointId a = family.samples()[i][(j - 1) * stride];
          PointId b = family.samples()[i][j * stride];
          double term = (vals[(j - 1) * stride] - vals[j * stride]) / space.dist(a, b);
          acc += (j % 2 == 1) ? -term : term;
        }
        acc *= scale;
        double bound = -1;
        if (test.breakpoints >= 0)
          bound = 2.0 * (test.breakpoints + 1) * test.lip * std::ldexp(1.0, -k) /
                  family.common_length();
        rows.push_back({test.name, i, k, std::abs(acc), bound});
      }
    }
  }
  return rows;
}

LipFunction glue_strips(const FiniteMetricSpace& ladder, const StripSchedule& schedule,
                        double extension_L) {
  if (!is_ladder(ladder))
    throw Error(ErrorKind::Precondition, "glue_strips: expected a ladder space");
  size_t m = schedule.functions.size();
  if (m == 0 || schedule.deltas.size() != m + 1)
    throw Error(ErrorKind::Precondition,
                "glue_strips: need one more delta than strip functions");
  for (size_t i = 0; i + 1 < schedule.deltas.size(); ++i) {
    if (!(schedule.deltas[i] > 2.0 * schedule.deltas[i + 1]))
      throw Error(ErrorKind::Precondition, "glue_strips: schedule must satisfy delta_i > 2 delta_{i+1}");
  }
  if (!(schedule.deltas.back() > 0))
    throw Error(ErrorKind::Precondition, "glue_strips: deltas must be positive");

  for (size_t i = 0; i < m; ++i) {
    const LipFunction& f = schedule.functions[i];
    if (f.space() != &ladder)
      throw Error(ErrorKind::Structural, "glue_strips: strip function on a different space");
    if (f.lip() > 1.0 + kDualityTol)
      throw Error(ErrorKind::Precondition, "glue_strips: strip function is not 1-Lipschitz");
    double floor = 2.0 * schedule.deltas[i + 1];
    for (int p = 0; p < ladder.size(); ++p)
      if (ladder.meta(p).b <= floor && std::abs(f(p)) > 1e-12)
        throw Error(ErrorKind::Precondition,
                    "glue_strips: strip function does not vanish at heights <= 2 delta_{i+1}");
  }

  std::map<PointId, double> partial;
  for (int p = 0; p < ladder.size(); ++p) {
    double h = ladder.meta(p).b;
    for (size_t i = 0; i < m; ++i) {
      if (h >= 2.0 * schedule.deltas[i + 1] && h < schedule.deltas[i]) {
        partial[p] = schedule.functions[i](p);
        break;
      }
    }
  }
  partial[ladder.base()] = 0.0;

  LipFunction glued = mcshane_extend(ladder, partial, extension_L, 1e-10);
  if (glued.lip() > extension_L + kDualityTol)
    throw Error(ErrorKind::Verification, "glue_strips: extension exceeded the Lipschitz bound");
  return glued;
}

NonWasqResult run_nonwasq_certificate(int levels, int zig_k) {
  if (levels < 1 || zig_k < 1)
    throw Error(ErrorKind::Precondition, "run_nonwasq_certificate: need levels >= 1, zig_k >= 1");

  LadderParams params;
  params.n_levels = 1;
  params.rung_resolution = 1 << zig_k;
  params.side_resolution = 4;
  for (int i = 1; i <= levels; ++i) {
    params.extra_rung_heights.push_back(std::ldexp(3.0, -2 * i - 2));  // inside (2 d_{i+1}, d_i)
    params.extra_side_heights.push_back(std::ldexp(1.0, -2 * i - 1));  // strip floor 2 d_{i+1}
  }

  NonWasqResult res;
  res.space = std::make_shared<const FiniteMetricSpace>(build_ladder(params));
  const FiniteMetricSpace& space = *res.space;

  for (int i = 1; i <= levels + 1; ++i) res.deltas.push_back(std::ldexp(1.0, -2 * i));

  PointId y_pt = ladder_point(space, 1.0, 0.0);
  FreeElement m_xy = molecule_element(space, space.base(), y_pt);

  StripSchedule schedule;
  schedule.deltas = res.deltas;
  std::vector<FreeElement> mus;

  for (int i = 1; i <= levels; ++i) {
    double delta_i = res.deltas[i - 1];
    double delta_next = res.deltas[i];
    double h = std::ldexp(3.0, -2 * i - 2);
    int segs = 1 << zig_k;

    MolecularDecomposition nu;
    double w = std::ldexp(1.0, -zig_k);
    std::vector<PointId> rung(segs + 1);
    for (int j = 0; j <= segs; ++j)
      rung[j] = ladder_point(space, static_cast<double>(j) / segs, h);
    for (int j = 1; j <= segs; ++j) {
      if (j % 2 == 1)
        nu.terms.push_back({w, Molecule{rung[j], rung[j - 1]}});
      else
        nu.terms.push_back({w, Molecule{rung[j - 1], rung[j]}});
    }
    FreeElement mu_elem = as_element(space, nu);

    NormCertificate cert = norm(space, mu_elem);
    if (std::abs(cert.value - 1.0) > kDualityTol)
      throw Error(ErrorKind::Verification, "run_nonwasq_certificate: rung zigzag norm is not 1");

    double gm = std::abs(pairing(cert.potentials, m_xy));
    double eps_i = 4.0 * delta_i;
    if (!(gm < eps_i))
      throw Error(ErrorKind::Verification,
                  "run_nonwasq_certificate: dual witness pairs too strongly with m_xy");

    LipFunction f_i = flatten(space, nu, cert.potentials, eps_i, 2.0 * delta_next);
    schedule.functions.push_back(f_i);
    mus.push_back(std::move(mu_elem));

    double bound = (cert.value - 4.0 * delta_i - 4.0 * delta_next) /
                   (1.0 + 4.0 * delta_i + 4.0 * delta_next);
    res.strips.push_back({delta_i, h, zig_k, cert.value, 0.0, bound, gm});
  }

  res.glued = std::make_unique<LipFunction>(glue_strips(space, schedule, 3.0));
  res.lip_glued = res.glued->lip();

  res.normalized_min = std::numeric_limits<double>::infinity();
  for (int i = 0; i < levels; ++i) {
    res.strips[i].pairing_glued = pairing(*res.glued, mus[i]);
    res.normalized_min = std::min(res.normalized_min,
                                  res.strips[i].pairing_glued / res.lip_glued);
  }
  return res;
}

}  // namespace lipfree
