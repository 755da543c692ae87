#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "g2mu/g2_structure.hpp"

namespace g2mu {

using LatticeVector = std::array<std::int64_t, kDim>;

std::string to_string(const LatticeVector& l);

template <class S>
struct RealScalarOf;
template <>
struct RealScalarOf<Rational> {
  using type = Rational;
};
template <>
struct RealScalarOf<double> {
  using type = double;
};
template <>
struct RealScalarOf<Complex> {
  using type = double;
};
template <class S>
using RealOf = typename RealScalarOf<S>::type;

template <class R>
Vec7<R> to_vec(const LatticeVector& l) {
  Vec7<R> v;
  for (int i = 0; i < kDim; ++i) v[i] = R(static_cast<long>(l[i]));
  return v;
}

/// Modes are indexed by integer frequencies k ∈ ℤ⁷: χ_k(x) = e^{2πi k·x} =
/// e^{2πi g(l,x)} with l = k♯ = G⁻¹k. For the Euclidean metric l = k.
///
/// Finite sum Σ_k χ_k α_k of grade-p forms, stored
/// together with a power k of (2πi): the form represented is (2πi)^k Σ χ_l α_l.
/// Keeping k separate makes every operator below rational on rational input.
template <class S>
class FourierForm {
 public:
  using Real = RealOf<S>;
  using Structure = G2Structure<Real>;
  using ModeMap = std::map<LatticeVector, ExteriorForm<S>>;

  FourierForm(std::shared_ptr<const Structure> structure, int grade, int order = 0);

  const Structure& structure() const { return *structure_; }
  const std::shared_ptr<const Structure>& structure_ptr() const { return structure_; }
  int grade() const { return grade_; }
  int order() const { return order_; }
  const ModeMap& modes() const { return modes_; }
  bool empty() const { return modes_.empty(); }

  /// Coefficient of χ_l (zero form if absent).
  ExteriorForm<S> mode(const LatticeVector& l) const;
  /// Replaces the coefficient of χ_l; zero coefficients are dropped.
  void set_mode(const LatticeVector& l, ExteriorForm<S> coeff);
  void add_to_mode(const LatticeVector& l, const ExteriorForm<S>& coeff);

  /// Same grade and structure, order and modes replaced.
  FourierForm with_order(int order) const;

  double max_magnitude() const;
  bool is_zero() const { return modes_.empty(); }

  /// Multiplies out (2πi)^k. Only meaningful for complex coefficients.
  FourierForm materialize() const
    requires std::is_same_v<S, Complex>;

  FourierForm& operator+=(const FourierForm& other);
  FourierForm& operator-=(const FourierForm& other);
  FourierForm& operator*=(const S& s);
  friend FourierForm operator+(FourierForm a, const FourierForm& b) { return a += b; }
  friend FourierForm operator-(FourierForm a, const FourierForm& b) { return a -= b; }
  friend FourierForm operator*(const S& s, FourierForm a) { return a *= s; }

 private:
  void check_compatible(const FourierForm& other) const;

  std::shared_ptr<const Structure> structure_;
  int grade_;
  int order_;
  ModeMap modes_;
};

/// value · (2πi)^order
template <class S>
struct FactoredScalar {
  S value;
  int order;
};

// Mode-wise operators. With the (2πi) factored out, d multiplies the mode
// coefficient by k∧ (k = l♭) and d* by −l⌟, each raising the order by one.

template <class S>
FourierForm<S> exterior_d(const FourierForm<S>& f);
template <class S>
FourierForm<S> coexterior_d(const FourierForm<S>& f);
/// Δ = dd* + d*d acts on χ_l α as 4π²‖l‖²; stored as −‖l‖² with order + 2.
template <class S>
FourierForm<S> laplacian(const FourierForm<S>& f);
/// Inverse of Δ on the non-constant modes; drops the l = 0 mode.
template <class S>
FourierForm<S> green(const FourierForm<S>& f);
/// The l = 0 part (harmonic forms on the flat torus).
template <class S>
FourierForm<S> harmonic_part(const FourierForm<S>& f);

template <class S>
FourierForm<S> hodge_star(const FourierForm<S>& f);
/// f ∧ c for a constant form c (φ, ψ, ...).
template <class S>
FourierForm<S> wedge_constant(const FourierForm<S>& f, const ExteriorForm<RealOf<S>>& c);
template <class S>
FourierForm<S> project(const FourierForm<S>& f, TypeLabel label);
template <class S>
FourierForm<S> apply_I(const FourierForm<S>& f);
template <class S>
FourierForm<S> apply_J(const FourierForm<S>& f);

/// L² pairing over T⁷ (antilinear in the first slot), volume included.
template <class S>
FactoredScalar<S> l2_inner(const FourierForm<S>& a, const FourierForm<S>& b);

/// Largest coefficient of a − b (orders must agree unless one side is empty).
template <class S>
double max_difference(const FourierForm<S>& a, const FourierForm<S>& b);

// ---------------------------------------------------------------------------
// Refined exterior derivatives.

enum class RefinedOp { d1_7, d7_1, d7_7, d7_14, d14_7, d7_27, d27_7, d14_27, d27_14, d27_27 };

inline constexpr std::array<RefinedOp, 10> kAllRefinedOps = {
    RefinedOp::d1_7,  RefinedOp::d7_1,  RefinedOp::d7_7,   RefinedOp::d7_14,  RefinedOp::d14_7,
    RefinedOp::d7_27, RefinedOp::d27_7, RefinedOp::d14_27, RefinedOp::d27_14, RefinedOp::d27_27};

std::string_view name(RefinedOp op);
/// Accepts the names produced by name(); throws InputError otherwise.
RefinedOp parse_refined_op(std::string_view text);

struct OpSignature {
  TypeLabel domain;
  TypeLabel codomain;
};
OpSignature signature(RefinedOp op);

/// Symbol of the operator at the mode with lattice vector l (2πi removed),
/// as a matrix on full coefficient spaces. Operators defined on a typed
/// domain include the projection onto that domain. The four adjoint-named
/// operators are the metric adjoints −H⁻¹MᵀH of their partners.
template <class R>
Matrix<R> refined_symbol(const G2Structure<R>& s, RefinedOp op, const LatticeVector& l);

/// Applies the operator mode-wise. In strict mode an input that is not of the
/// domain type raises PreconditionFailed instead of being projected.
template <class S>
FourierForm<S> refined(RefinedOp op, const FourierForm<S>& f, bool strict = false);

// ---------------------------------------------------------------------------
// Random trigonometric forms.

struct RandomFormOptions {
  int max_abs_component = 3;  // modes drawn from ‖l‖∞ ≤ this
  int mode_count = 3;         // distinct ±l pairs
  bool include_constant = false;
  bool real = true;           // coefficient(−l) = conj(coefficient(l))
  /// If non-empty, these modes are used instead of random ones (the constant
  /// mode is still governed by include_constant).
  std::vector<LatticeVector> modes;
};

/// mode_count distinct nonzero lattice vectors, no two related by l ↦ −l.
std::vector<LatticeVector> random_modes(std::mt19937_64& rng, int mode_count, int max_abs_component);

/// Coefficients uniform in [−1,1] per real and imaginary part, projected
/// onto the requested type.
FourierForm<Complex> random_form(std::shared_ptr<const G2Structure<double>> s, TypeLabel label,
                                 std::mt19937_64& rng, const RandomFormOptions& opts = {});

/// Random form of the given type whose modes satisfy l⌟α_l = 0 (so d*α = 0)
/// and have no constant part. Types may be combined, e.g. {1, 27} on 3-forms.
FourierForm<Complex> random_coclosed_form(std::shared_ptr<const G2Structure<double>> s, int grade,
                                          const std::vector<int>& components, std::mt19937_64& rng,
                                          const RandomFormOptions& opts = {});

// ---------------------------------------------------------------------------
// Identity suite.

template <class S>
struct IdentityInputs {
  FourierForm<S> f;       // 0-form
  FourierForm<S> alpha;   // 1-form
  FourierForm<S> beta;    // type 14 two-form
  FourierForm<S> gamma;   // type 27 three-form
  FourierForm<S> alpha2;  // second 1-form, for adjointness
  FourierForm<S> beta2;   // second type 14 two-form
  FourierForm<S> gamma2;  // second type 27 three-form
  FourierForm<S> two_form;    // untyped, for the commutation checks
  FourierForm<S> three_form;  // untyped
};

struct IdentityResidual {
  std::string name;
  double residual = 0.0;
};

/// Evaluates every refined-operator formula, the fourteen quadratic
/// identities equivalent to d² = 0, the four Laplacian formulas and the
/// adjointness relations on the given inputs.
/// With strict set, refined operators reject mistyped inputs instead of
/// projecting them.
template <class S>
std::vector<IdentityResidual> identity_residuals(const IdentityInputs<S>& in, bool strict = false);

struct IdentityReport {
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<IdentityResidual> max_residuals;  // in evaluation order
  double worst() const;
};

/// Runs identity_residuals on `trials` seeded random inputs and keeps the
/// maximum per identity. Trial i uses the seed sequence (seed, i).
IdentityReport verify_identities(std::shared_ptr<const G2Structure<double>> s, std::size_t trials, std::uint64_t seed,
                               const RandomFormOptions& opts = {}, bool strict = false);

// ---------------------------------------------------------------------------
// Hessian structure.

/// ω = fφ + γ ∈ d*Ω⁴ ∩ Ω³_{1⊕27} split as ω⁺ = fφ + 7/12 d⁷₂₇d²⁷₇Gγ and
/// ω⁻ = γ − 7/12 d⁷₂₇d²⁷₇Gγ. Throws PreconditionFailed if ω has a constant
/// part, is not coclosed, or has a type 7 component.
template <class S>
std::pair<FourierForm<S>, FourierForm<S>> split_S4(const FourierForm<S>& omega);

enum class HessianKind { E, F };

struct HessianBlock {
  std::string name;
  FourierForm<Complex> component;  // the part of the input in this block
  FourierForm<Complex> action;     // the block operator applied to it
};

struct HessianBlocks {
  std::vector<HessianBlock> blocks;
  /// Δ + 2d*Id (E) or Δ + 2d*Jd (F) applied to the non-constant part of the input.
  FourierForm<Complex> direct;
  /// Largest deviation of Σ block actions from `direct`, of Σ components from
  /// the input, and of the harmonic block from the identity.
  double residual = 0.0;
};

/// Splits a 2-form (E) or 3-form (F) into the blocks harmonic / exact /
/// d*d of type 7 / (type 14 coexact) or (S⁺, S⁻), and applies Id, dd*, d*d,
/// −d*d (E) or Id, dd*, d*d, 3d*d, −d*d (F).
HessianBlocks hessian_blocks(HessianKind kind, const FourierForm<Complex>& f);

/// Property suite for the Hessian block structure on seeded random forms:
/// d*Id = −d*d on coexact type 14 two-forms, the E and F block tables, and
/// π₂₇dω⁺ = 0, π₇dω⁻ = 0, ⟨ω⁺, ω⁻⟩ = 0 for split_S4. Maximum per check.
std::vector<IdentityResidual> hessian_residuals(std::shared_ptr<const G2Structure<double>> s, std::size_t trials,
                                                std::uint64_t seed, const RandomFormOptions& opts = {});

}  // namespace g2mu
