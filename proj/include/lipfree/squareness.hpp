#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "lipfree/free_space.hpp"
#include "lipfree/metric_graph.hpp"

namespace lipfree {

// Height window for molecules: both endpoint heights strictly inside
// (delta, eps).
struct MolWindow {
  double delta;
  double eps;
};

std::vector<Molecule> mol_window_members(const FiniteMetricSpace& ladder, const MolWindow& window);

// Given nu supported strictly above `delta`, a norming functional g with
// |<g, m_xy>| < eps, produce f with lip <= 1 that vanishes at heights <= delta
// and still pairs with nu above (sum_lambda - eps - 2 delta)/(1 + eps + 2 delta).
// Construction: h = g + <g, m_uv> pi_1 with u = (0,delta), v = (1,delta), then
// f = (h - h(u)) / ||h|| above delta and 0 below.
LipFunction flatten(const FiniteMetricSpace& ladder, const MolecularDecomposition& nu,
                    const LipFunction& g, double eps, double delta);

struct MoleculeFilterResult {
  double delta;           // returned window floor: half the minimum kept height
  double eps;             // requested window ceiling
  MolecularDecomposition nu;
  double distance;        // ||mu - as_element(nu)|| by the norm engine
  double j_mass;          // discarded weight (terms with both heights >= eps/16)
  double split_mismatch;  // largest height gap when no exact split point existed
};

// Checks ||m_xy +- mu|| < 1 + eps^2/64 and ||mu|| > 1 - eps^2/64, decomposes
// mu, splits molecules crossing height eps/16 at a segment point of that
// height, drops the terms living entirely at or above eps/16, and returns the
// low part. Throws ContradictionError when the dropped mass exceeds 15 eps/16.
MoleculeFilterResult molecule_filter(const FiniteMetricSpace& ladder, const FreeElement& mu,
                                     double eps);

// Dyadic zigzag data on internally disjoint geodesics of a common length d:
// samples p_j = gamma_i(j 2^-k) at the deepest level, the base element
// y = sum n^-1 m_{u_i v_i}, and the per-level alternating elements.
class ZigzagFamily {
 public:
  const FiniteMetricSpace& space() const { return *space_; }
  std::shared_ptr<const FiniteMetricSpace> space_ptr() const { return space_; }
  int k_max() const { return k_max_; }
  int n_geodesics() const { return static_cast<int>(samples_.size()); }
  double common_length() const { return d_; }
  const std::vector<std::vector<PointId>>& samples() const { return samples_; }
  PointId sample(int i, int k, int j) const;  // p_j^{ik}

  const FreeElement& y() const { return y_; }
  // nu_k^i = 2^-k sum_j (-1)^j m_{p_{j-1} p_j}; negative signs flip the
  // molecule's orientation so all weights stay positive.
  MolecularDecomposition nu_decomposition(int i, int k) const;
  FreeElement nu(int i, int k) const;
  FreeElement mu(int k) const;

 private:
  friend ZigzagFamily make_zigzag(const MetricGraph&, const std::vector<std::pair<int, int>>&,
                                  int);
  std::shared_ptr<const FiniteMetricSpace> space_;
  std::vector<std::vector<PointId>> samples_;
  std::vector<std::pair<PointId, PointId>> endpoints_;
  double d_ = 0;
  int k_max_ = 0;
  FreeElement y_;
};

// Routes one geodesic per pair (greedy, blocking interiors so images meet only
// in endpoints), verifies the common length, samples at depth k_max. Errors on
// unequal lengths or when no internally disjoint geodesic exists.
ZigzagFamily make_zigzag(const MetricGraph& g, const std::vector<std::pair<int, int>>& pairs,
                         int k_max);

// The alternating witness: 0 at even samples, 2^-k d at odd ones, extended by
// McShane with L = 1. Requires separated images for non-intersecting geodesic
// pairs: d(image_i, image_j) > 2^-k d. pairing(witness, mu_k) = 1.
LipFunction zigzag_witness(const ZigzagFamily& family, int k);

struct TrendTest {
  std::string name;
  // Evaluated at a sample point with its arc parameter t in [0,1].
  std::function<double(const FiniteMetricSpace&, PointId, double)> eval;
  int breakpoints = -1;  // B for piecewise-linear tests; -1 = no bound asserted
  double lip = 0.0;      // Lipschitz constant in the parameter t
};

struct TrendRow {
  std::string test;
  int geodesic;
  int k;
  double abs_pairing;
  double bound;  // 2 (B+1) lip 2^-k / d, or -1 when not applicable
};

std::vector<TrendRow> weak_null_trend(const ZigzagFamily& family,
                                      const std::vector<TrendTest>& tests, int k_lo, int k_hi);

// Strictly decreasing deltas with delta_i > 2 delta_{i+1}; strip i is the
// height band [2 delta_{i+1}, delta_i) carrying functions[i].
struct StripSchedule {
  std::vector<double> deltas;        // size = functions.size() + 1
  std::vector<LipFunction> functions;
};

// Glue the strip functions on their bands (plus 0 at the base) and extend by
// McShane with the given constant. Each f_i must be 1-Lipschitz and vanish at
// heights <= 2 delta_{i+1}.
LipFunction glue_strips(const FiniteMetricSpace& ladder, const StripSchedule& schedule,
                        double extension_L = 3.0);

struct NonWasqStrip {
  double delta;        // delta_i
  double rung_height;  // zigzag rung inside (2 delta_{i+1}, delta_i)
  int k;               // zigzag depth
  double nu_norm;
  double pairing_glued;
  double bound;        // (nu_norm - 4 d_i - 4 d_{i+1})/(1 + 4 d_i + 4 d_{i+1})
  double g_mxy;        // |<g_i, m_xy>|, must stay below 4 delta_i
};

struct NonWasqResult {
  std::shared_ptr<const FiniteMetricSpace> space;
  std::vector<double> deltas;
  std::vector<NonWasqStrip> strips;
  std::unique_ptr<LipFunction> glued;
  double lip_glued = 0;
  double normalized_min = 0;  // min_i pairing_i / lip_glued
};

// The full certificate pipeline on the ladder: schedule delta_i = 4^-i,
// candidate sequence = rung zigzags at heights 3 * 4^-i / 4, per-strip
// functionals from flatten, glue with L = 3.
NonWasqResult run_nonwasq_certificate(int levels = 5, int zig_k = 4);

}  // namespace lipfree
