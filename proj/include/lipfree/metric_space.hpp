#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lipfree/common.hpp"

namespace lipfree {

struct PointMeta {
  std::string label;
  bool has_coords = false;
  double a = 0.0;  // horizontal coordinate (ladder) or free metadata
  double b = 0.0;  // height
};

struct TriangleViolation {
  PointId i, j, k;   // d(i,k) > d(i,j) + d(j,k)
  double excess;
};

struct ValidationReport {
  int n = 0;
  std::vector<std::pair<PointId, PointId>> asymmetric;
  std::vector<PointId> bad_diagonal;
  std::vector<std::pair<PointId, PointId>> nonpositive;  // off-diagonal entries <= 0
  std::vector<TriangleViolation> triangle;
  bool sampled_triangles = false;  // true when only a random subset of triples was checked

  bool ok() const {
    return asymmetric.empty() && bad_diagonal.empty() && nonpositive.empty() && triangle.empty();
  }
  std::string summary() const;
};

// Throws Error(Structural) on a non-square matrix; metric violations go in the report.
ValidationReport validate_metric(const std::vector<std::vector<double>>& dist,
                                 double tol = kMetricTol);

enum class SpaceKind { Generic, Ladder, GraphDerived };

// Immutable finite metric space: point metadata, dense symmetric distance
// matrix, distinguished base point. Construction validates the metric
// invariants (full O(n^3) triangle scan up to kFullTriangleCheckLimit points,
// deterministic sampling above that).
class FiniteMetricSpace {
 public:
  static constexpr int kFullTriangleCheckLimit = 400;

  FiniteMetricSpace(std::vector<PointMeta> points, std::vector<double> dist_row_major,
                    PointId base, SpaceKind kind = SpaceKind::Generic);

  int size() const { return n_; }
  PointId base() const { return base_; }
  SpaceKind kind() const { return kind_; }

  double dist(PointId i, PointId j) const { return dist_[static_cast<size_t>(i) * n_ + j]; }

  const PointMeta& meta(PointId i) const { return points_[i]; }
  const std::vector<PointMeta>& points() const { return points_; }
  const std::vector<double>& matrix() const { return dist_; }

  void check_id(PointId p, const char* who) const;

  // Exact coordinate lookup (ladder spaces); nullopt when absent.
  std::optional<PointId> find_coords(double a, double b) const;

 private:
  int n_;
  PointId base_;
  SpaceKind kind_;
  std::vector<PointMeta> points_;
  std::vector<double> dist_;
};

// All p with d(u,p) + d(v,p) <= d(u,v) + tol, sorted by id.
std::vector<PointId> segment(const FiniteMetricSpace& space, PointId u, PointId v, double tol);

}  // namespace lipfree
