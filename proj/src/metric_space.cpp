#include "lipfree/metric_space.hpp"

#include <cmath>
#include <cstdint>
#include <sstream>

namespace lipfree {

namespace {

constexpr int kMaxReported = 64;

// Shared core for the public matrix validator and the constructor.
ValidationReport validate_rowmajor(int n, const double* d, double tol, bool full_triangle) {
  ValidationReport rep;
  rep.n = n;
  auto at = [&](int i, int j) { return d[static_cast<size_t>(i) * n + j]; };

  for (int i = 0; i < n; ++i) {
    if (std::abs(at(i, i)) > tol) {
      if (static_cast<int>(rep.bad_diagonal.size()) < kMaxReported) rep.bad_diagonal.push_back(i);
    }
    for (int j = i + 1; j < n; ++j) {
      if (std::abs(at(i, j) - at(j, i)) > tol) {
        if (static_cast<int>(rep.asymmetric.size()) < kMaxReported) rep.asymmetric.push_back({i, j});
      }
      if (at(i, j) <= tol) {
        if (static_cast<int>(rep.nonpositive.size()) < kMaxReported) rep.nonpositive.push_back({i, j});
      }
    }
  }

  auto check_triple = [&](int i, int j, int k) {
    double excess = at(i, k) - at(i, j) - at(j, k);
    if (excess > tol && static_cast<int>(rep.triangle.size()) < kMaxReported)
      rep.triangle.push_back({i, j, k, excess});
  };

  if (full_triangle) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        for (int k = 0; k < n; ++k) {
          if (k == i || k == j) continue;
          check_triple(i, j, k);
        }
      }
  } else {
    rep.sampled_triangles = true;
    std::uint64_t s = 0x9e3779b97f4a7c15ull;
    auto rnd = [&]() {
      s ^= s << 13; s ^= s >> 7; s ^= s << 17;
      return s;
    };
    const long long samples = 2'000'000;
    for (long long t = 0; t < samples; ++t) {
      int i = static_cast<int>(rnd() % n), j = static_cast<int>(rnd() % n),
          k = static_cast<int>(rnd() % n);
      if (i == j || j == k || i == k) continue;
      check_triple(i, j, k);
    }
  }
  return rep;
}

}  // namespace

std::string ValidationReport::summary() const {
  std::ostringstream os;
  if (ok()) {
    os << "OK (" << n << " points" << (sampled_triangles ? ", sampled triangles" : "") << ")";
    return os.str();
  }
  os << "metric violations:";
  if (!bad_diagonal.empty()) os << " nonzero diagonal at " << bad_diagonal[0] << ";";
  if (!asymmetric.empty())
    os << " asymmetric pair (" << asymmetric[0].first << "," << asymmetric[0].second << ");";
  if (!nonpositive.empty())
    os << " nonpositive off-diagonal (" << nonpositive[0].first << "," << nonpositive[0].second
       << ");";
  if (!triangle.empty())
    os << " triangle violation (" << triangle[0].i << "," << triangle[0].j << "," << triangle[0].k
       << ") excess " << triangle[0].excess << ";";
  return os.str();
}

ValidationReport validate_metric(const std::vector<std::vector<double>>& dist, double tol) {
  int n = static_cast<int>(dist.size());
  for (const auto& row : dist)
    if (static_cast<int>(row.size()) != n)
      throw Error(ErrorKind::Structural, "validate_metric: matrix is not square");
  std::vector<double> flat;
  flat.reserve(static_cast<size_t>(n) * n);
  for (const auto& row : dist) flat.insert(flat.end(), row.begin(), row.end());
  return validate_rowmajor(n, flat.data(), tol, true);
}

FiniteMetricSpace::FiniteMetricSpace(std::vector<PointMeta> points,
                                     std::vector<double> dist_row_major, PointId base,
                                     SpaceKind kind)
    : n_(static_cast<int>(points.size())),
      base_(base),
      kind_(kind),
      points_(std::move(points)),
      dist_(std::move(dist_row_major)) {
  if (n_ == 0) throw Error(ErrorKind::Structural, "FiniteMetricSpace: empty point set");
  if (dist_.size() != static_cast<size_t>(n_) * n_)
    throw Error(ErrorKind::Structural, "FiniteMetricSpace: matrix size does not match point count");
  if (base_ < 0 || base_ >= n_)
    throw Error(ErrorKind::Structural, "FiniteMetricSpace: base point out of range");
  ValidationReport rep =
      validate_rowmajor(n_, dist_.data(), kMetricTol, n_ <= kFullTriangleCheckLimit);
  if (!rep.ok())
    throw Error(ErrorKind::Verification, "FiniteMetricSpace: " + rep.summary());
}

void FiniteMetricSpace::check_id(PointId p, const char* who) const {
  if (p < 0 || p >= n_)
    throw Error(ErrorKind::Structural,
                std::string(who) + ": point id " + std::to_string(p) + " out of range");
}

std::optional<PointId> FiniteMetricSpace::find_coords(double a, double b) const {
  for (int i = 0; i < n_; ++i)
    if (points_[i].has_coords && points_[i].a == a && points_[i].b == b) return i;
  return std::nullopt;
}

std::vector<PointId> segment(const FiniteMetricSpace& space, PointId u, PointId v, double tol) {
  space.check_id(u, "segment");
  space.check_id(v, "segment");
  std::vector<PointId> out;
  double duv = space.dist(u, v);
  for (int p = 0; p < space.size(); ++p)
    if (space.dist(u, p) + space.dist(v, p) <= duv + tol) out.push_back(p);
  return out;
}

}  // namespace lipfree
