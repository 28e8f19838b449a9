#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "lipfree/rng.hpp"
#include "lipfree/squareness.hpp"
#include "lipfree/ssd2p.hpp"

namespace lipfree {

// Random test instances: Euclidean clouds and shortest-path metrics of random
// connected graphs, mixed evenly.
FiniteMetricSpace random_space(Rng& rng, int n);
FreeElement random_element(Rng& rng, const FiniteMetricSpace& space, int max_support = 8);

struct OracleInstanceStat {
  int n;
  int support;
  double gap;  // |flow value - LP dual value|
};

struct OracleSuiteReport {
  std::uint64_t seed;
  int count;
  double max_gap = 0;
  double max_lip_slack = 0;          // potentials' Lipschitz excess over 1
  double max_dual_pairing_gap = 0;   // |<potentials, elem> - value|
  double max_conservation_gap = 0;   // flow conservation defect
  std::vector<OracleInstanceStat> instances;
  nlohmann::json to_json() const;
};

OracleSuiteReport run_oracle_suite(std::uint64_t seed, int count);

// CSV with columns k, norm_mu, norm_y_plus, norm_y_minus, max_test_pairing
// over the default test battery (affine, vee, distance-to-base).
std::string zigzag_csv(const MetricGraph& g, const std::vector<std::pair<int, int>>& pairs,
                       int k_lo, int k_hi);

std::vector<TrendTest> default_trend_tests();

nlohmann::json nonwasq_to_json(const NonWasqResult& res);

// Canonical SSD2P refutation scene: a finely discretized path with anchors at
// integer positions, slice elements supported in each bump, and y a uniform
// average of rightward molecules between the anchors.
struct Ssd2pScene {
  std::shared_ptr<const FiniteMetricSpace> space;
  Ssd2pInstance instance;
  FreeElement y;
  std::vector<FreeElement> xs;
};

Ssd2pScene build_ssd2p_path_scene(double d_param, double eps, int n_anchors, int m_y_molecules);

nlohmann::json refutation_to_json(const RefutationReport& rep, const Ssd2pInstance& inst);

}  // namespace lipfree
