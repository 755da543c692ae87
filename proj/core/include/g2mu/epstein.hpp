#pragma once

#include <vector>

#include "g2mu/orbifold.hpp"

namespace g2mu {

/// Γ(z) for complex z (Lanczos, reflection for Re z < ½). Throws
/// PoleEncountered at nonpositive integers.
Complex complex_gamma(Complex z);
/// 1/Γ(z), entire; exactly zero at nonpositive integers.
Complex reciprocal_gamma(Complex z);
/// Γ(a, x) = ∫_x^∞ t^{a−1}e^{−t} dt for complex a and x > 0.
Complex upper_incomplete_gamma(Complex a, double x);

/// Lattice Λ = Bℤ^r with the quadratic form Q[n] = nᵀ gram n and a rational
/// twist: the point Σ n_j b_j carries the phase e^{2πi Σ n_j twist_j}.
struct TwistedLattice {
  Matrix<Rational> basis;  // 7×r frequency vectors; empty for abstract lattices
  Matrix<double> gram;     // r×r, positive definite
  std::vector<Rational> twist;

  std::size_t rank() const { return gram.rows(); }
  bool untwisted() const;
};

/// Validates and builds an abstract lattice. A missing twist means zero.
TwistedLattice make_lattice(const Matrix<double>& gram, std::vector<Rational> twist = {});

/// {l : Al = l}, written in frequency coordinates {k ∈ ℤ⁷ : Aᵀk = k} with
/// Q[k] = kᵀG⁻¹k and twist q_j = b_j·t mod 1. Throws InputError if the
/// lattice is trivial.
TwistedLattice fixed_lattice(const AffineElement& a, const Metric7<Rational>& g);

/// Z(s) = Σ_{n≠0} e^{2πi n·q} Q[n]^{−s}, continued to all s. Throws
/// PoleEncountered at s = r/2 when the twist is trivial.
Complex epstein_value(const TwistedLattice& lattice, Complex s);

/// Z(0). Real for the symmetric twists produced by fixed_lattice.
double value_at_zero(const TwistedLattice& lattice);

struct ZetaTerm {
  std::size_t element = 0;
  std::size_t rank = 0;
  bool twisted = false;
  double value_at_zero = 0.0;
  Rational tr8;
  Rational tr12;
};

struct NumericInvariants {
  double mu3 = 0.0;
  double mu4 = 0.0;
  std::vector<ZetaTerm> terms;  // one per group element
};

/// μ₃ = (1/|Γ|) Σ Tr₈(A) Z_A(0) and μ₄ likewise with Tr₁₂, with the continued
/// values computed numerically rather than assumed.
NumericInvariants closed_form_mu(const JoyceOrbifold& o);

}  // namespace g2mu
