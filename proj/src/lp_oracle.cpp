#include "lipfree/lp_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace lipfree {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kEnterTol = 1e-10;

// Textbook tableau simplex for max problems with equality rows and an
// all-artificial start. Dantzig pricing with a permanent switch to Bland's
// rule once the objective stalls.
struct Tableau {
  int nr, nc;                            // rows, structural columns
  std::vector<std::vector<double>> T;    // nr rows + objective row; last column is RHS
  std::vector<int> basis;
  std::vector<char> allowed;
  int iterations = 0;

  Tableau(int rows, int cols) : nr(rows), nc(cols) {
    T.assign(nr + 1, std::vector<double>(nc + nr + 1, 0.0));
    basis.resize(nr);
    allowed.assign(nc + nr, 1);
    for (int i = 0; i < nr; ++i) {
      T[i][nc + i] = 1.0;
      basis[i] = nc + i;
    }
  }

  int last() const { return nc + nr; }

  void set_objective(const std::vector<double>& costs) {  // maximize costs^T x
    auto& obj = T[nr];
    std::fill(obj.begin(), obj.end(), 0.0);
    for (int j = 0; j < static_cast<int>(costs.size()); ++j) obj[j] = -costs[j];
    for (int i = 0; i < nr; ++i) {
      double coef = obj[basis[i]];
      if (coef == 0.0) continue;
      for (int j = 0; j <= last(); ++j) obj[j] -= coef * T[i][j];
    }
  }

  void pivot(int row, int col) {
    double piv = T[row][col];
    for (int j = 0; j <= last(); ++j) T[row][j] /= piv;
    for (int i = 0; i <= nr; ++i) {
      if (i == row) continue;
      double f = T[i][col];
      if (f == 0.0) continue;
      for (int j = 0; j <= last(); ++j) T[i][j] -= f * T[row][j];
      T[i][col] = 0.0;
    }
    basis[row] = col;
  }

  void run(long long max_iters) {
    bool bland = false;
    int stall = 0;
    double prev = T[nr][last()];
    while (true) {
      auto& obj = T[nr];
      int enter = -1;
      if (!bland) {
        double best = -kEnterTol;
        for (int j = 0; j < last(); ++j)
          if (allowed[j] && obj[j] < best) {
            best = obj[j];
            enter = j;
          }
      } else {
        for (int j = 0; j < last(); ++j)
          if (allowed[j] && obj[j] < -kEnterTol) {
            enter = j;
            break;
          }
      }
      if (enter < 0) return;

      int row = -1;
      double best_ratio = 0;
      for (int i = 0; i < nr; ++i) {
        if (T[i][enter] <= kPivotTol) continue;
        double ratio = T[i][last()] / T[i][enter];
        if (row < 0 || ratio < best_ratio - 1e-13 ||
            (ratio < best_ratio + 1e-13 && basis[i] < basis[row])) {
          row = i;
          best_ratio = ratio;
        }
      }
      if (row < 0) throw Error(ErrorKind::Verification, "lp_norm_oracle: unbounded tableau");
      pivot(row, enter);

      if (++iterations > max_iters)
        throw Error(ErrorKind::Verification, "lp_norm_oracle: iteration limit exceeded");
      double cur = T[nr][last()];
      if (cur > prev + 1e-13) {
        stall = 0;
        prev = cur;
      } else if (++stall > 2 * (nr + nc) + 300) {
        bland = true;
      }
    }
  }
};

}  // namespace

LpResult lp_norm_oracle(const FiniteMetricSpace& space, const FreeElement& elem) {
  LpResult res;
  if (elem.empty()) {
    res.potentials[space.base()] = 0.0;
    return res;
  }

  std::vector<PointId> nodes;
  std::vector<double> rhs;
  for (const auto& [p, c] : elem.coeffs()) {
    space.check_id(p, "lp_norm_oracle");
    nodes.push_back(p);
    rhs.push_back(c);
  }
  nodes.push_back(space.base());  // no conservation row for the base
  int m = static_cast<int>(nodes.size());
  int nr = m - 1;

  struct Arc {
    int from, to;
    double cost;
  };
  std::vector<Arc> arcs;
  arcs.reserve(static_cast<size_t>(m) * (m - 1));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (i != j) arcs.push_back({i, j, space.dist(nodes[i], nodes[j])});
  int nc = static_cast<int>(arcs.size());

  Tableau tab(nr, nc);
  std::vector<int> flip(nr, 1);
  for (int i = 0; i < nr; ++i)
    if (rhs[i] < 0) flip[i] = -1;
  for (int j = 0; j < nc; ++j) {
    const Arc& a = arcs[j];
    if (a.from < nr) tab.T[a.from][j] += flip[a.from];
    if (a.to < nr) tab.T[a.to][j] -= flip[a.to];
  }
  for (int i = 0; i < nr; ++i) tab.T[i][tab.last()] = std::abs(rhs[i]);

  // Phase 1: drive the artificials out.
  std::vector<double> costs(nc + nr, 0.0);
  for (int i = 0; i < nr; ++i) costs[nc + i] = -1.0;
  tab.set_objective(costs);
  tab.run(200000);
  if (tab.T[nr][tab.last()] < -1e-7)
    throw Error(ErrorKind::Verification, "lp_norm_oracle: infeasible conservation system");

  // Phase 2: minimize transport cost; artificials may stay basic at zero but
  // never re-enter.
  std::fill(costs.begin(), costs.end(), 0.0);
  for (int j = 0; j < nc; ++j) costs[j] = -arcs[j].cost;
  for (int i = 0; i < nr; ++i) tab.allowed[nc + i] = 0;
  tab.set_objective(costs);
  tab.run(200000);

  res.primal_value = -tab.T[nr][tab.last()];
  res.iterations = tab.iterations;

  // Multipliers: objective-row entries under the artificial columns, undone
  // for the phase-1 row flips; base potential pinned to zero.
  std::vector<double> f(m, 0.0);
  for (int i = 0; i < nr; ++i) f[i] = -flip[i] * tab.T[nr][nc + i];

  double dual = 0;
  for (int i = 0; i < nr; ++i) dual += rhs[i] * f[i];
  res.dual_value = dual;

  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      double slack = space.dist(nodes[i], nodes[j]) - (f[i] - f[j]);
      if (slack < -1e-8)
        throw Error(ErrorKind::Verification,
                    "lp_norm_oracle: multipliers violate the Lipschitz polytope");
    }
  if (std::abs(res.primal_value - res.dual_value) > 1e-7)
    throw Error(ErrorKind::Verification, "lp_norm_oracle: strong duality gap in tableau");

  for (int i = 0; i < m; ++i) res.potentials[nodes[i]] = f[i];
  return res;
}

}  // namespace lipfree
