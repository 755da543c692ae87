#pragma once

#include "g2mu/orbifold.hpp"

namespace g2mu {

struct InvariantPair {
  Rational mu3;
  Rational mu4;
};

/// (Tr(A)² − Tr(A²))/2 − 2Tr(A) + 1
Rational tr8_su3(const Matrix<Rational>& a);
/// (Tr(A)³ + 2Tr(A³) − 3Tr(A²)Tr(A))/6 − (Tr(A)² − Tr(A²))/2 − 2
Rational tr12_su3(const Matrix<Rational>& a);

/// μ₃ = −(1/|Γ|) Σ Tr₈(A), μ₄ = −(1/|Γ|) Σ Tr₁₂(A) over the matrix parts.
InvariantPair mu_invariants(const OrbifoldGroup& group);
inline InvariantPair mu_invariants(const JoyceOrbifold& o) { return mu_invariants(o.group); }

}  // namespace g2mu
