#pragma once

#include <map>
#include <vector>

#include "lipfree/lip_function.hpp"
#include "lipfree/metric_space.hpp"

namespace lipfree {

// Finitely supported element of the free space: sparse point -> coefficient
// map. The base point's Dirac is the zero functional, so base entries are
// dropped at construction and never stored; exact zeros are pruned.
class FreeElement {
 public:
  FreeElement() = default;

  static FreeElement from_coeffs(const std::map<PointId, double>& coeffs, PointId base);

  const std::map<PointId, double>& coeffs() const { return coeffs_; }
  bool empty() const { return coeffs_.empty(); }
  double coeff(PointId p) const {
    auto it = coeffs_.find(p);
    return it == coeffs_.end() ? 0.0 : it->second;
  }

  void add(PointId p, double v, PointId base);
  FreeElement& axpy(double alpha, const FreeElement& other, PointId base);
  FreeElement scaled(double factor) const;

  double sum() const;         // sum of coefficients
  double total_mass() const;  // sum of |coefficients|
  FreeElement pruned(double tol) const;

 private:
  std::map<PointId, double> coeffs_;
};

struct Molecule {
  PointId u, v;  // m_uv = (delta_u - delta_v) / d(u,v), u != v
};

// Errors with Precondition on u == v.
FreeElement molecule_element(const FiniteMetricSpace& space, PointId u, PointId v);

struct MolecularDecomposition {
  std::vector<std::pair<double, Molecule>> terms;  // weights > 0
  double sum_lambda() const;
};

FreeElement as_element(const FiniteMetricSpace& space, const MolecularDecomposition& dec);

struct FlowArc {
  PointId from, to;
  double amount;  // > 0
};

// value = min-cost transport realizing the coefficients (base supplies or
// absorbs any imbalance for free); flow and potentials certify each other:
// the potentials are 1-Lipschitz on the whole space and pair with the element
// to the value.
struct NormCertificate {
  double value;
  std::vector<FlowArc> flow;
  LipFunction potentials;
};

NormCertificate norm(const FiniteMetricSpace& space, const FreeElement& elem);

// Flow value only; skips building the dual witness.
double norm_value(const FiniteMetricSpace& space, const FreeElement& elem);

// Optimal flow recast as a convex-cone combination of molecules: each arc
// (u,v,amount) contributes (amount * d(u,v), m_uv). Sum of weights equals the
// norm; re-summation reproduces the element.
MolecularDecomposition decompose(const FiniteMetricSpace& space, const FreeElement& elem);

// <f, element> = sum of coeff(p) * f(p).
double pairing(const LipFunction& f, const FreeElement& elem);

}  // namespace lipfree
