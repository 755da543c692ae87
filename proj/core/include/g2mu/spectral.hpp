#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string_view>
#include <vector>

#include "g2mu/fourier.hpp"
#include "g2mu/intlinalg.hpp"
#include "g2mu/orbifold.hpp"

namespace g2mu {

/// H: modes of type 14 two-forms, H′: modes of type 27 three-forms.
enum class ModeKind { H, Hprime };
std::string_view name(ModeKind kind);
/// Per-mode dimension: 8 for H, 12 for H′.
int mode_dimension(ModeKind kind);

/// Nonzero frequencies with a common ‖l‖²_g; the eigenvalue is −4π²·norm_sq.
struct EigenClass {
  Rational norm_sq;
  std::vector<LatticeVector> vectors;
};

/// ‖l‖²_g for the frequency k (l = G⁻¹k), exactly.
Rational mode_norm_sq(const G2Structure<Rational>& s, const LatticeVector& k);

/// All nonzero frequencies with 0 < ‖l‖²_g ≤ radius_sq, grouped by exact norm,
/// ascending. radius_sq ≤ 0 gives an empty list.
std::vector<EigenClass> enumerate_classes(const G2Structure<Rational>& s, const Rational& radius_sq);
inline std::vector<EigenClass> enumerate_classes(const JoyceOrbifold& o, const Rational& radius_sq) {
  return enumerate_classes(o.structure, radius_sq);
}

/// Pullback of χ_k α by x ↦ Ax + t: e^{2πi·phase} χ_{k_out} A*α.
struct ModeAction {
  Rational phase;  // g(l, t) = k·t reduced mod 1
  LatticeVector k_out;
  /// In vector coordinates l_out = G⁻¹AᵀG l. False when this differs from Aᵀl.
  bool transpose_rule_agrees = true;
  ExteriorForm<Rational> alpha_out;
};

/// Whether G⁻¹AᵀG l and Aᵀl coincide for l = G⁻¹k.
bool transpose_rule_agrees(const G2Structure<Rational>& s, const Matrix<Rational>& a, const LatticeVector& k);

ModeAction group_action_on_mode(const G2Structure<Rational>& s, const AffineElement& a, const LatticeVector& k,
                                 const ExteriorForm<Rational>& alpha);

/// {α ∈ Λ²₁₄ : l⌟α = 0} (H) or {α ∈ Λ³₂₇ : l⌟α = 0} (H′), as an exact
/// fraction-free kernel of the defining constraints.
struct ModeSpace {
  ModeKind kind;
  LatticeVector k;
  ScaledKernel kernel;

  std::size_t dimension() const { return kernel.vectors.size(); }
  /// Exact basis; vector j is 1 at its free coordinate.
  std::vector<ExteriorForm<Rational>> basis() const;
};

/// Mode spaces for one structure, built on first use. Thread-safe.
class ModeSpaceCache {
 public:
  explicit ModeSpaceCache(std::shared_ptr<const G2Structure<Rational>> s);

  const G2Structure<Rational>& structure() const { return *structure_; }
  const ModeSpace& get(ModeKind kind, const LatticeVector& k);
  std::size_t size() const;

 private:
  std::shared_ptr<const G2Structure<Rational>> structure_;
  std::vector<std::vector<Int128>> fixed_rows_h_;
  std::vector<std::vector<Int128>> fixed_rows_hprime_;
  mutable std::mutex mutex_;
  std::map<std::pair<int, LatticeVector>, std::unique_ptr<ModeSpace>> spaces_;
};

ModeSpace build_mode_space(const G2Structure<Rational>& s, ModeKind kind, const LatticeVector& k);

/// Σ w_j e^{2πi q_j} with rational q_j mod 1. Exact when every denominator
/// divides 12 (values in ℚ(i, √3)); floating otherwise.
class PhaseSum {
 public:
  void add(const Rational& exponent, const Rational& weight);
  /// The sum, if it is exactly a rational number.
  std::optional<Rational> exact_rational() const;
  bool is_exact() const;
  Complex value() const;
  const std::map<Rational, Rational>& terms() const { return terms_; }

 private:
  std::map<Rational, Rational> terms_;
};

/// (1/|Γ|) Σ_𝒜 Tr(𝒜* on H(λ)) from explicit matrices of the pullback on each
/// fixed mode space. Off-diagonal blocks (k_out ≠ k) have zero trace.
std::int64_t invariant_dimension_bruteforce(const JoyceOrbifold& o, const EigenClass& cls, ModeKind kind,
                                            ModeSpaceCache* cache = nullptr);

/// (1/|Γ|) Σ_𝒜 Σ_{l ∈ class, Al = l} e^{2πi g(l,t)} Tr₈^{SU(3)}(A) (Tr₁₂ for H′).
std::int64_t invariant_dimension_formula(const JoyceOrbifold& o, const EigenClass& cls, ModeKind kind);

struct TraceCheck {
  Rational trace8;
  Rational trace12;
  Rational residual8;   // |trace8 − Tr₈^{SU(3)}(A)|
  Rational residual12;  // |trace12 − Tr₁₂^{SU(3)}(A)|
};

/// Traces of A* on the H and H′ mode spaces at k. Throws NotFixed unless
/// Al = l and k ≠ 0.
TraceCheck su3_trace_check(const JoyceOrbifold& o, const AffineElement& a, const LatticeVector& k);

enum class MorseKind { mu3, mu4 };
enum class DimensionRoute { bruteforce, formula };

/// Σ_{classes ≤ radius_sq} dim H(λ)^Γ / (4π²‖l‖²)^s. Throws
/// ConvergenceRegionViolated for s ≤ 7/2.
double partial_morse_sum(const JoyceOrbifold& o, MorseKind kind, double s, const Rational& radius_sq,
                         DimensionRoute route = DimensionRoute::bruteforce, ModeSpaceCache* cache = nullptr);

struct SpectralRecord {
  Rational norm_sq;
  ModeKind kind;
  std::size_t class_size = 0;
  std::int64_t dim_bruteforce = 0;
  std::int64_t dim_formula = 0;
  bool match() const { return dim_bruteforce == dim_formula; }
};

/// One record per (class, kind), classes ascending, H before H′.
std::vector<SpectralRecord> spectral_report(const JoyceOrbifold& o, const Rational& radius_sq,
                                            ModeSpaceCache* cache = nullptr);

}  // namespace g2mu
