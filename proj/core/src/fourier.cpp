#include "g2mu/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace g2mu {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

template <class S>
bool all_zero(const ExteriorForm<S>& a) {
  for (const auto& c : a.coeffs())
    if (!(c == S(0))) return false;
  return true;
}

LatticeVector negate(const LatticeVector& l) {
  LatticeVector m;
  for (int i = 0; i < kDim; ++i) m[i] = -l[i];
  return m;
}

bool is_zero_vector(const LatticeVector& l) {
  return std::all_of(l.begin(), l.end(), [](std::int64_t x) { return x == 0; });
}

/// The vector l = G⁻¹k dual to the frequency k.
template <class R>
Vec7<R> sharp_of(const G2Structure<R>& s, const LatticeVector& k) {
  const auto kv = to_vec<R>(k);
  const auto v = g2mu::apply(s.metric().inverse_gram(), std::vector<R>(kv.begin(), kv.end()));
  Vec7<R> out;
  std::copy(v.begin(), v.end(), out.begin());
  return out;
}

template <class R>
R norm_sq(const G2Structure<R>& s, const LatticeVector& k) {
  const auto v = sharp_of(s, k);
  return s.metric().pair(v, v);
}

template <class S, class Fn>
FourierForm<S> map_modes(const FourierForm<S>& f, int grade, int order, Fn fn) {
  FourierForm<S> out(f.structure_ptr(), grade, order);
  for (const auto& [l, c] : f.modes()) {
    auto r = fn(l, c);
    if (r.grade() != grade) throw std::logic_error("mode map produced the wrong grade");
    out.set_mode(l, std::move(r));
  }
  return out;
}

template <class S, class R>
ExteriorForm<S> apply_matrix(const Matrix<R>& m, const ExteriorForm<S>& a, int grade) {
  return ExteriorForm<S>(grade, g2mu::apply(m, a.coeffs()));
}

template <class R>
Matrix<R> negated_adjoint(const G2Structure<R>& s, const Matrix<R>& m, int from, int to) {
  return R(-1) * (s.inverse_induced(from) * m.transpose() * s.metric().induced(to));
}

template <class S>
S conj_of(const S& x) {
  return ScalarTraits<S>::conj(x);
}

template <class S>
Complex to_complex(const S& x) {
  if constexpr (std::is_same_v<S, Rational>) {
    return Complex(to_double(x), 0.0);
  } else {
    return Complex(x);
  }
}

}  // namespace

std::string to_string(const LatticeVector& l) {
  std::string s = "(";
  for (int i = 0; i < kDim; ++i) {
    if (i) s += ",";
    s += std::to_string(l[i]);
  }
  return s + ")";
}

// ---------------------------------------------------------------------------
// FourierForm

template <class S>
FourierForm<S>::FourierForm(std::shared_ptr<const Structure> structure, int grade, int order)
    : structure_(std::move(structure)), grade_(grade), order_(order) {
  if (!structure_) throw std::invalid_argument("FourierForm needs a structure");
  if (grade < 0 || grade > kDim) throw GradeError("grade " + std::to_string(grade) + " outside 0..7");
}

template <class S>
ExteriorForm<S> FourierForm<S>::mode(const LatticeVector& l) const {
  const auto it = modes_.find(l);
  return it == modes_.end() ? ExteriorForm<S>(grade_) : it->second;
}

template <class S>
void FourierForm<S>::set_mode(const LatticeVector& l, ExteriorForm<S> coeff) {
  if (coeff.grade() != grade_) throw GradeError("mode coefficient has the wrong grade");
  if (all_zero(coeff)) {
    modes_.erase(l);
  } else {
    modes_[l] = std::move(coeff);
  }
}

template <class S>
void FourierForm<S>::add_to_mode(const LatticeVector& l, const ExteriorForm<S>& coeff) {
  set_mode(l, mode(l) + coeff);
}

template <class S>
FourierForm<S> FourierForm<S>::with_order(int order) const {
  FourierForm out = *this;
  out.order_ = order;
  return out;
}

template <class S>
double FourierForm<S>::max_magnitude() const {
  double m = 0.0;
  for (const auto& [l, c] : modes_) m = std::max(m, c.max_magnitude());
  return m;
}

template <class S>
FourierForm<S> FourierForm<S>::materialize() const
  requires std::is_same_v<S, Complex>
{
  const Complex factor = std::pow(Complex(0.0, kTwoPi), order_);
  FourierForm out(structure_, grade_, 0);
  for (const auto& [l, c] : modes_) out.set_mode(l, factor * c);
  return out;
}

template <class S>
void FourierForm<S>::check_compatible(const FourierForm& other) const {
  if (other.grade_ != grade_) throw GradeError("cannot add Fourier forms of different grades");
  if (structure_ != other.structure_ && structure_->frame() != other.structure_->frame())
    throw std::invalid_argument("Fourier forms live on different structures");
  if (order_ != other.order_ && !modes_.empty() && !other.modes_.empty())
    throw std::logic_error("cannot add Fourier forms with different powers of 2πi");
}

template <class S>
FourierForm<S>& FourierForm<S>::operator+=(const FourierForm& other) {
  check_compatible(other);
  if (modes_.empty()) order_ = other.order_;
  for (const auto& [l, c] : other.modes_) add_to_mode(l, c);
  return *this;
}

template <class S>
FourierForm<S>& FourierForm<S>::operator-=(const FourierForm& other) {
  check_compatible(other);
  if (modes_.empty()) order_ = other.order_;
  for (const auto& [l, c] : other.modes_) add_to_mode(l, S(-1) * c);
  return *this;
}

template <class S>
FourierForm<S>& FourierForm<S>::operator*=(const S& s) {
  ModeMap scaled;
  for (auto& [l, c] : modes_) {
    c *= s;
    if (!all_zero(c)) scaled.emplace(l, std::move(c));
  }
  modes_ = std::move(scaled);
  return *this;
}

// ---------------------------------------------------------------------------
// Mode-wise operators

template <class S>
FourierForm<S> exterior_d(const FourierForm<S>& f) {
  using R = RealOf<S>;
  if (f.grade() == kDim) throw GradeError("d of a 7-form");
  return map_modes(f, f.grade() + 1, f.order() + 1, [&](const LatticeVector& l, const ExteriorForm<S>& c) {
    const auto eps = wedge_matrix(ExteriorForm<R>::covector(to_vec<R>(l)), f.grade());
    return apply_matrix(eps, c, f.grade() + 1);
  });
}

template <class S>
FourierForm<S> coexterior_d(const FourierForm<S>& f) {
  using R = RealOf<S>;
  if (f.grade() == 0) throw GradeError("d* of a 0-form");
  return map_modes(f, f.grade() - 1, f.order() + 1, [&](const LatticeVector& l, const ExteriorForm<S>& c) {
    const auto iota = interior_matrix(sharp_of(f.structure(), l), f.grade());
    return apply_matrix(R(-1) * iota, c, f.grade() - 1);
  });
}

template <class S>
FourierForm<S> laplacian(const FourierForm<S>& f) {
  using R = RealOf<S>;
  const auto& s = f.structure();
  return map_modes(f, f.grade(), f.order() + 2, [&](const LatticeVector& l, const ExteriorForm<S>& c) {
    return S(R(-1) * norm_sq(s, l)) * c;
  });
}

template <class S>
FourierForm<S> green(const FourierForm<S>& f) {
  using R = RealOf<S>;
  const auto& s = f.structure();
  FourierForm<S> out(f.structure_ptr(), f.grade(), f.order() - 2);
  for (const auto& [l, c] : f.modes()) {
    if (is_zero_vector(l)) continue;
    out.set_mode(l, S(R(-1) / norm_sq(s, l)) * c);
  }
  return out;
}

template <class S>
FourierForm<S> harmonic_part(const FourierForm<S>& f) {
  FourierForm<S> out(f.structure_ptr(), f.grade(), f.order());
  const LatticeVector zero{};
  out.set_mode(zero, f.mode(zero));
  return out;
}

template <class S>
FourierForm<S> hodge_star(const FourierForm<S>& f) {
  const auto& m = f.structure().star(f.grade());
  return map_modes(f, kDim - f.grade(), f.order(),
                   [&](const LatticeVector&, const ExteriorForm<S>& c) { return apply_matrix(m, c, kDim - f.grade()); });
}

template <class S>
FourierForm<S> wedge_constant(const FourierForm<S>& f, const ExteriorForm<RealOf<S>>& c) {
  const auto m = wedge_matrix(c, f.grade());
  // a ∧ c = (−1)^{|a||c|} c ∧ a
  const int sign = (f.grade() * c.grade()) % 2 ? -1 : 1;
  const int grade = f.grade() + c.grade();
  return map_modes(f, grade, f.order(), [&](const LatticeVector&, const ExteriorForm<S>& a) {
    auto r = apply_matrix(m, a, grade);
    if (sign < 0) r *= S(-1);
    return r;
  });
}

template <class S>
FourierForm<S> project(const FourierForm<S>& f, TypeLabel label) {
  if (label.grade != f.grade()) throw GradeError("grade mismatch in projection onto " + to_string(label));
  const auto& p = f.structure().projection(label);
  return map_modes(f, f.grade(), f.order(),
                   [&](const LatticeVector&, const ExteriorForm<S>& c) { return apply_matrix(p, c, f.grade()); });
}

template <class S>
FourierForm<S> apply_I(const FourierForm<S>& f) {
  if (f.grade() != 3) throw GradeError("I acts on 3-forms");
  const auto& m = f.structure().I_matrix();
  return map_modes(f, 3, f.order(), [&](const LatticeVector&, const ExteriorForm<S>& c) { return apply_matrix(m, c, 3); });
}

template <class S>
FourierForm<S> apply_J(const FourierForm<S>& f) {
  if (f.grade() != 4) throw GradeError("J acts on 4-forms");
  const auto& m = f.structure().J_matrix();
  return map_modes(f, 4, f.order(), [&](const LatticeVector&, const ExteriorForm<S>& c) { return apply_matrix(m, c, 4); });
}

template <class S>
FactoredScalar<S> l2_inner(const FourierForm<S>& a, const FourierForm<S>& b) {
  if (a.grade() != b.grade()) throw GradeError("L² pairing of forms of different grades");
  const auto& h = a.structure().metric().induced(a.grade());
  S acc(0);
  for (const auto& [l, ca] : a.modes()) {
    const auto it = b.modes().find(l);
    if (it == b.modes().end()) continue;
    const auto hb = g2mu::apply(h, it->second.coeffs());
    for (std::size_t i = 0; i < hb.size(); ++i) acc += conj_of(ca.coeffs()[i]) * hb[i];
  }
  acc *= S(a.structure().metric().vol());
  // conj((2πi)^k) = (−1)^k (2πi)^k
  if (a.order() % 2) acc *= S(-1);
  return {acc, a.order() + b.order()};
}

template <class S>
double max_difference(const FourierForm<S>& a, const FourierForm<S>& b) {
  if (a.grade() != b.grade()) throw GradeError("comparing Fourier forms of different grades");
  if (a.order() != b.order() && !a.empty() && !b.empty())
    throw std::logic_error("comparing Fourier forms with different powers of 2πi");
  std::set<LatticeVector> keys;
  for (const auto& [l, c] : a.modes()) keys.insert(l);
  for (const auto& [l, c] : b.modes()) keys.insert(l);
  double worst = 0.0;
  for (const auto& l : keys) worst = std::max(worst, (a.mode(l) - b.mode(l)).max_magnitude());
  return worst;
}

// ---------------------------------------------------------------------------
// Refined operators

std::string_view name(RefinedOp op) {
  switch (op) {
    case RefinedOp::d1_7: return "d1_7";
    case RefinedOp::d7_1: return "d7_1";
    case RefinedOp::d7_7: return "d7_7";
    case RefinedOp::d7_14: return "d7_14";
    case RefinedOp::d14_7: return "d14_7";
    case RefinedOp::d7_27: return "d7_27";
    case RefinedOp::d27_7: return "d27_7";
    case RefinedOp::d14_27: return "d14_27";
    case RefinedOp::d27_14: return "d27_14";
    case RefinedOp::d27_27: return "d27_27";
  }
  return "?";
}

RefinedOp parse_refined_op(std::string_view text) {
  for (auto op : kAllRefinedOps)
    if (name(op) == text) return op;
  throw InputError("unknown refined operator '" + std::string(text) + "'");
}

OpSignature signature(RefinedOp op) {
  switch (op) {
    case RefinedOp::d1_7: return {{0, 1}, {1, 7}};
    case RefinedOp::d7_1: return {{1, 7}, {0, 1}};
    case RefinedOp::d7_7: return {{1, 7}, {1, 7}};
    case RefinedOp::d7_14: return {{1, 7}, {2, 14}};
    case RefinedOp::d14_7: return {{2, 14}, {1, 7}};
    case RefinedOp::d7_27: return {{1, 7}, {3, 27}};
    case RefinedOp::d27_7: return {{3, 27}, {1, 7}};
    case RefinedOp::d14_27: return {{2, 14}, {3, 27}};
    case RefinedOp::d27_14: return {{3, 27}, {2, 14}};
    case RefinedOp::d27_27: return {{3, 27}, {3, 27}};
  }
  throw std::logic_error("unhandled refined operator");
}

template <class R>
Matrix<R> refined_symbol(const G2Structure<R>& s, RefinedOp op, const LatticeVector& l) {
  const auto flat = ExteriorForm<R>::covector(to_vec<R>(l));
  auto eps = [&](int p) { return wedge_matrix(flat, p); };
  auto proj = [&](int p, int c) -> const Matrix<R>& { return s.projection({p, c}); };
  switch (op) {
    case RefinedOp::d1_7:
      return eps(0);
    case RefinedOp::d7_7:
      // α ↦ ⋆d(α∧ψ)
      return s.star(6) * eps(5) * wedge_matrix(s.psi(), 1);
    case RefinedOp::d7_14:
      return proj(2, 14) * eps(1);
    case RefinedOp::d7_27:
      // α ↦ π₂₇ d⋆(α∧ψ)
      return proj(3, 27) * eps(2) * s.star(5) * wedge_matrix(s.psi(), 1);
    case RefinedOp::d14_27:
      return proj(3, 27) * eps(2) * proj(2, 14);
    case RefinedOp::d27_27:
      // γ ↦ ⋆π₂₇(dγ)
      return s.star(4) * proj(4, 27) * eps(3) * proj(3, 27);
    case RefinedOp::d7_1:
      return negated_adjoint(s, refined_symbol(s, RefinedOp::d1_7, l), 0, 1);
    case RefinedOp::d14_7:
      return negated_adjoint(s, refined_symbol(s, RefinedOp::d7_14, l), 1, 2);
    case RefinedOp::d27_7:
      return negated_adjoint(s, refined_symbol(s, RefinedOp::d7_27, l), 1, 3);
    case RefinedOp::d27_14:
      return negated_adjoint(s, refined_symbol(s, RefinedOp::d14_27, l), 2, 3);
  }
  throw std::logic_error("unhandled refined operator");
}

template <class S>
FourierForm<S> refined(RefinedOp op, const FourierForm<S>& f, bool strict) {
  const auto sig = signature(op);
  if (f.grade() != sig.domain.grade)
    throw GradeError(std::string(name(op)) + " acts on " + std::to_string(sig.domain.grade) + "-forms");
  if (strict && type_components(sig.domain.grade).size() > 1) {
    const auto projected = project(f, sig.domain);
    const double scale = std::max(1.0, f.max_magnitude());
    if (max_difference(projected, f) > 1e-9 * scale)
      throw PreconditionFailed("input type", std::string(name(op)) + " needs an input of type " + to_string(sig.domain));
  }
  const auto& s = f.structure();
  return map_modes(f, sig.codomain.grade, f.order() + 1, [&](const LatticeVector& l, const ExteriorForm<S>& c) {
    return apply_matrix(refined_symbol(s, op, l), c, sig.codomain.grade);
  });
}

// ---------------------------------------------------------------------------
// Random forms

std::vector<LatticeVector> random_modes(std::mt19937_64& rng, int mode_count, int max_abs_component) {
  if (max_abs_component < 1) throw InputError("random modes need max_abs_component >= 1");
  std::uniform_int_distribution<int> comp(-max_abs_component, max_abs_component);
  std::set<LatticeVector> used;
  std::vector<LatticeVector> out;
  int guard = 0;
  while (static_cast<int>(out.size()) < mode_count) {
    if (++guard > 100000) throw InputError("could not draw enough distinct random modes");
    LatticeVector l;
    for (auto& x : l) x = comp(rng);
    if (is_zero_vector(l) || used.count(l) || used.count(negate(l))) continue;
    used.insert(l);
    out.push_back(l);
  }
  return out;
}

namespace {

std::vector<LatticeVector> modes_for(std::mt19937_64& rng, const RandomFormOptions& opts) {
  std::vector<LatticeVector> out;
  if (opts.include_constant) out.push_back(LatticeVector{});
  const auto drawn = opts.modes.empty() ? random_modes(rng, opts.mode_count, opts.max_abs_component) : opts.modes;
  for (const auto& l : drawn)
    if (!is_zero_vector(l)) out.push_back(l);
  return out;
}

ExteriorForm<Complex> random_coefficients(int grade, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ExteriorForm<Complex> c(grade);
  for (auto& x : c.coeffs()) {
    const double re = u(rng);
    const double im = u(rng);
    x = Complex(re, im);
  }
  return c;
}

ExteriorForm<Complex> conjugate(const ExteriorForm<Complex>& a) {
  ExteriorForm<Complex> c = a;
  for (auto& x : c.coeffs()) x = std::conj(x);
  return c;
}

/// H-orthogonal projector onto {a ∈ ⊕ components : l⌟a = 0} inside Λ^grade.
Matrix<double> coclosed_projector(const G2Structure<double>& s, int grade, const std::vector<int>& components,
                                  const LatticeVector& l) {
  const std::size_t n = basis_size(grade);
  Matrix<double> span(n, 0);
  for (int c : components) span = hstack(span, s.spanning_set({grade, c}));
  const Matrix<double> b = span * nullspace(interior_matrix(sharp_of(s, l), grade) * span);
  const Matrix<double>& h = s.metric().induced(grade);
  // g-orthonormal basis of the column span (Gram-Schmidt, twice); spanning
  // sets may be redundant, so near-dependent columns are dropped.
  std::vector<std::vector<double>> q;
  auto dot = [&](const std::vector<double>& x, const std::vector<double>& y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) acc += x[i] * h(i, j) * y[j];
    return acc;
  };
  for (std::size_t c = 0; c < b.cols(); ++c) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = b(i, c);
    const double before = std::sqrt(dot(v, v));
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& e : q) {
        const double t = dot(e, v);
        for (std::size_t i = 0; i < n; ++i) v[i] -= t * e[i];
      }
    const double after = std::sqrt(dot(v, v));
    if (after <= 1e-10 * before) continue;
    for (auto& x : v) x /= after;
    q.push_back(std::move(v));
  }
  // P = Σ e eᵀH
  Matrix<double> p(n, n);
  for (const auto& e : q) {
    std::vector<double> eh(n, 0.0);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) eh[j] += e[i] * h(i, j);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) p(i, j) += e[i] * eh[j];
  }
  return p;
}

}  // namespace

FourierForm<Complex> random_form(std::shared_ptr<const G2Structure<double>> s, TypeLabel label, std::mt19937_64& rng,
                                 const RandomFormOptions& opts) {
  if (!is_valid_label(label)) throw GradeError("invalid type label " + to_string(label));
  const auto& p = s->projection(label);
  FourierForm<Complex> f(s, label.grade);
  for (const auto& l : modes_for(rng, opts)) {
    auto c = apply_matrix(p, random_coefficients(label.grade, rng), label.grade);
    if (opts.real && !is_zero_vector(l)) {
      f.set_mode(negate(l), conjugate(c));
    } else if (opts.real) {
      for (auto& x : c.coeffs()) x = Complex(x.real(), 0.0);
    }
    f.set_mode(l, std::move(c));
  }
  return f;
}

FourierForm<Complex> random_coclosed_form(std::shared_ptr<const G2Structure<double>> s, int grade,
                                          const std::vector<int>& components, std::mt19937_64& rng,
                                          const RandomFormOptions& opts) {
  RandomFormOptions o = opts;
  o.include_constant = false;
  FourierForm<Complex> f(s, grade);
  for (const auto& l : modes_for(rng, o)) {
    const auto p = coclosed_projector(*s, grade, components, l);
    auto c = apply_matrix(p, random_coefficients(grade, rng), grade);
    if (o.real) f.set_mode(negate(l), conjugate(c));
    f.set_mode(l, std::move(c));
  }
  return f;
}

// ---------------------------------------------------------------------------
// Identity suite

template <class S>
std::vector<IdentityResidual> identity_residuals(const IdentityInputs<S>& in, bool strict) {
  using R = RealOf<S>;
  using F = FourierForm<S>;
  const auto& s = in.f.structure();
  const auto phi = s.phi();
  const auto psi = s.psi();
  auto D = [strict](RefinedOp op, const F& x) { return refined(op, x, strict); };
  auto c = [](double x) { return S(R(x)); };
  auto q = [](long p, long r) {
    if constexpr (std::is_same_v<R, Rational>) {
      return S(Rational(p, r));
    } else {
      return S(static_cast<double>(p) / static_cast<double>(r));
    }
  };
  auto vol_form = [&](const F& scalar) { return wedge_constant(scalar, s.volume()); };

  const F& f = in.f;
  const F& a = in.alpha;
  const F& b = in.beta;
  const F& g = in.gamma;
  using Op = RefinedOp;

  std::vector<IdentityResidual> out;
  auto check = [&](std::string name, const F& lhs, const F& rhs) {
    out.push_back({std::move(name), max_difference(lhs, rhs)});
  };
  auto vanish = [&](std::string name, const F& lhs) { out.push_back({std::move(name), lhs.max_magnitude()}); };

  // Scalars
  check("scalar: d f = d1_7 f", exterior_d(f), D(Op::d1_7, f));
  check("scalar: d(f phi) = d1_7 f ^ phi", exterior_d(wedge_constant(f, phi)), wedge_constant(D(Op::d1_7, f), phi));
  check("scalar: d(f psi) = d1_7 f ^ psi", exterior_d(wedge_constant(f, psi)), wedge_constant(D(Op::d1_7, f), psi));

  // One-forms
  const F d77a = D(Op::d7_7, a);
  const F d71a = D(Op::d7_1, a);
  check("one-form: d alpha", exterior_d(a),
        q(1, 3) * hodge_star(wedge_constant(d77a, psi)) + D(Op::d7_14, a));
  check("one-form: d(alpha ^ phi)", exterior_d(wedge_constant(a, phi)),
        q(2, 3) * wedge_constant(d77a, psi) - hodge_star(D(Op::d7_14, a)));
  check("one-form: d*(alpha ^ phi)", exterior_d(hodge_star(wedge_constant(a, phi))),
        q(4, 7) * wedge_constant(d71a, psi) + q(1, 2) * wedge_constant(d77a, phi) + hodge_star(D(Op::d7_27, a)));
  check("one-form: d*(alpha ^ psi)", exterior_d(hodge_star(wedge_constant(a, psi))),
        q(-3, 7) * wedge_constant(d71a, phi) - q(1, 2) * hodge_star(wedge_constant(d77a, phi)) + D(Op::d7_27, a));
  check("one-form: d(alpha ^ psi)", exterior_d(wedge_constant(a, psi)), hodge_star(d77a));
  check("one-form: d*alpha", exterior_d(hodge_star(a)), c(-1) * vol_form(d71a));

  // Type 14 two-forms
  check("type14: d beta", exterior_d(b),
        q(1, 4) * hodge_star(wedge_constant(D(Op::d14_7, b), phi)) + D(Op::d14_27, b));
  check("type14: d^* beta", coexterior_d(b), D(Op::d14_7, b));

  // Type 27 three-forms
  check("type27: d gamma", exterior_d(g),
        q(1, 4) * wedge_constant(D(Op::d27_7, g), phi) + hodge_star(D(Op::d27_27, g)));
  check("type27: d^* gamma", coexterior_d(g),
        q(1, 3) * hodge_star(wedge_constant(D(Op::d27_7, g), psi)) + D(Op::d27_14, g));

  // d² = 0
  vanish("d2: d7_7 d1_7 = 0", D(Op::d7_7, D(Op::d1_7, f)));
  vanish("d2: d7_14 d1_7 = 0", D(Op::d7_14, D(Op::d1_7, f)));
  vanish("d2: d7_1 d7_7 = 0", D(Op::d7_1, d77a));
  check("d2: d14_7 d7_14 = 2/3 (d7_7)^2", D(Op::d14_7, D(Op::d7_14, a)), q(2, 3) * D(Op::d7_7, d77a));
  check("d2: d27_7 d7_27 = (d7_7)^2 + 12/7 d1_7 d7_1", D(Op::d27_7, D(Op::d7_27, a)),
        D(Op::d7_7, d77a) + q(12, 7) * D(Op::d1_7, d71a));
  vanish("d2: d7_14 d7_7 + 2 d27_14 d7_27 = 0", D(Op::d7_14, d77a) + c(2) * D(Op::d27_14, D(Op::d7_27, a)));
  vanish("d2: 3 d14_27 d7_14 + d7_27 d7_7 = 0", c(3) * D(Op::d14_27, D(Op::d7_14, a)) + D(Op::d7_27, d77a));
  vanish("d2: 2 d27_27 d7_27 - d7_27 d7_7 = 0", c(2) * D(Op::d27_27, D(Op::d7_27, a)) - D(Op::d7_27, d77a));
  vanish("d2: d7_1 d14_7 = 0", D(Op::d7_1, D(Op::d14_7, b)));
  vanish("d2: d7_7 d14_7 + 2 d27_7 d14_27 = 0",
         D(Op::d7_7, D(Op::d14_7, b)) + c(2) * D(Op::d27_7, D(Op::d14_27, b)));
  vanish("d2: d7_27 d14_7 + 4 d27_27 d14_27 = 0",
         D(Op::d7_27, D(Op::d14_7, b)) + c(4) * D(Op::d27_27, D(Op::d14_27, b)));
  vanish("d2: 3 d14_7 d27_14 + d7_7 d27_7 = 0",
         c(3) * D(Op::d14_7, D(Op::d27_14, g)) + D(Op::d7_7, D(Op::d27_7, g)));
  vanish("d2: 2 d27_7 d27_27 - d7_7 d27_7 = 0",
         c(2) * D(Op::d27_7, D(Op::d27_27, g)) - D(Op::d7_7, D(Op::d27_7, g)));
  vanish("d2: d7_14 d27_7 + 4 d27_14 d27_27 = 0",
         D(Op::d7_14, D(Op::d27_7, g)) + c(4) * D(Op::d27_14, D(Op::d27_27, g)));

  // Laplacians
  auto hodge_laplacian = [](const F& x) {
    F out(x.structure_ptr(), x.grade(), x.order() + 2);
    if (x.grade() > 0) out += exterior_d(coexterior_d(x));
    if (x.grade() < kDim) out += coexterior_d(exterior_d(x));
    return out;
  };
  check("laplacian: functions", hodge_laplacian(f), D(Op::d7_1, D(Op::d1_7, f)));
  check("laplacian: one-forms", hodge_laplacian(a), D(Op::d7_7, d77a) + D(Op::d1_7, d71a));
  check("laplacian: type14", hodge_laplacian(b),
        q(5, 4) * D(Op::d7_14, D(Op::d14_7, b)) + D(Op::d27_14, D(Op::d14_27, b)));
  check("laplacian: type27", hodge_laplacian(g),
        q(7, 12) * D(Op::d7_27, D(Op::d27_7, g)) + D(Op::d14_27, D(Op::d27_14, g)) + D(Op::d27_27, D(Op::d27_27, g)));

  // Adjointness and self-adjointness under the L² pairing.
  auto pairing = [&](std::string name, const F& x1, const F& y1, const F& x2, const F& y2) {
    const auto lhs = l2_inner(x1, y1);
    const auto rhs = l2_inner(x2, y2);
    if (lhs.order != rhs.order) throw std::logic_error("pairing orders differ in " + name);
    out.push_back({std::move(name), ScalarTraits<S>::magnitude(lhs.value - rhs.value)});
  };
  pairing("adjoint: <d1_7 f, alpha> = <f, d7_1 alpha>", D(Op::d1_7, f), a, f, d71a);
  pairing("adjoint: <d7_14 alpha, beta> = <alpha, d14_7 beta>", D(Op::d7_14, a), b, a, D(Op::d14_7, b));
  pairing("adjoint: <d7_27 alpha, gamma> = <alpha, d27_7 gamma>", D(Op::d7_27, a), g, a, D(Op::d27_7, g));
  pairing("adjoint: <d14_27 beta, gamma> = <beta, d27_14 gamma>", D(Op::d14_27, b), g, b, D(Op::d27_14, g));
  pairing("adjoint: d7_7 self-adjoint", d77a, in.alpha2, a, D(Op::d7_7, in.alpha2));
  pairing("adjoint: d27_27 self-adjoint", D(Op::d27_27, g), in.gamma2, g, D(Op::d27_27, in.gamma2));
  pairing("adjoint: <d beta, gamma> = <beta, d^* gamma>", exterior_d(b), g, b, coexterior_d(g));

  // Type bookkeeping and commutation with Δ.
  for (const auto& label : std::vector<TypeLabel>{{2, 7}, {2, 14}, {3, 1}, {3, 7}, {3, 27}}) {
    const F& x = label.grade == 2 ? in.two_form : in.three_form;
    check("commute: laplacian with pi " + to_string(label), laplacian(project(x, label)), project(laplacian(x), label));
  }
  vanish("type: no type-1 part in d(gamma)", project(exterior_d(g), {4, 1}));
  vanish("d d = 0 on one-forms", exterior_d(exterior_d(a)));
  vanish("d^* d^* = 0 on three-forms", coexterior_d(coexterior_d(in.three_form)));
  return out;
}

double IdentityReport::worst() const {
  double w = 0.0;
  for (const auto& r : max_residuals) w = std::max(w, r.residual);
  return w;
}

IdentityReport verify_identities(std::shared_ptr<const G2Structure<double>> s, std::size_t trials, std::uint64_t seed,
                               const RandomFormOptions& opts, bool strict) {
  if (trials < 1) throw InputError("verify_identities needs at least one trial");
  IdentityReport report;
  report.trials = trials;
  report.seed = seed;
  for (std::size_t t = 0; t < trials; ++t) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(t)};
    std::mt19937_64 rng(seq);
    RandomFormOptions trial_opts = opts;
    if (trial_opts.modes.empty())
      trial_opts.modes = random_modes(rng, opts.mode_count, opts.max_abs_component);
    IdentityInputs<Complex> in{
        random_form(s, {0, 1}, rng, trial_opts),  random_form(s, {1, 7}, rng, trial_opts),
        random_form(s, {2, 14}, rng, trial_opts), random_form(s, {3, 27}, rng, trial_opts),
        random_form(s, {1, 7}, rng, trial_opts),  random_form(s, {2, 14}, rng, trial_opts),
        random_form(s, {3, 27}, rng, trial_opts), FourierForm<Complex>(s, 2),
        FourierForm<Complex>(s, 3)};
    in.two_form = random_form(s, {2, 7}, rng, trial_opts) + random_form(s, {2, 14}, rng, trial_opts);
    in.three_form = random_form(s, {3, 1}, rng, trial_opts) + random_form(s, {3, 7}, rng, trial_opts) +
                    random_form(s, {3, 27}, rng, trial_opts);
    const auto r = identity_residuals(in, strict);
    if (report.max_residuals.empty()) {
      report.max_residuals = r;
    } else {
      for (std::size_t i = 0; i < r.size(); ++i)
        report.max_residuals[i].residual = std::max(report.max_residuals[i].residual, r[i].residual);
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Hessian structure

template <class S>
std::pair<FourierForm<S>, FourierForm<S>> split_S4(const FourierForm<S>& omega) {
  using R = RealOf<S>;
  if (omega.grade() != 3) throw GradeError("split_S4 acts on 3-forms");
  const double scale = std::max(1.0, omega.max_magnitude());
  const double tol = std::is_same_v<S, Rational> ? 0.0 : 1e-9 * scale;
  if (harmonic_part(omega).max_magnitude() > tol)
    throw PreconditionFailed("no harmonic part", "input has a constant mode");
  if (coexterior_d(omega).max_magnitude() > tol)
    throw PreconditionFailed("coclosed", "d* of the input does not vanish");
  if (project(omega, {3, 7}).max_magnitude() > tol)
    throw PreconditionFailed("type 1+27", "input has a type 7 component");

  const auto gamma = project(omega, {3, 27});
  const auto f_phi = project(omega, {3, 1});
  const auto correction =
      S(R(7) / R(12)) * refined(RefinedOp::d7_27, refined(RefinedOp::d27_7, green(gamma)));
  return {f_phi + correction, gamma - correction};
}

namespace {

using CForm = FourierForm<Complex>;

/// Orthogonal projection, mode by mode, onto {a ∈ ⊕ components : l⌟a = 0}.
CForm project_coclosed_type(const CForm& x, const std::vector<int>& components) {
  const auto& s = x.structure();
  CForm out(x.structure_ptr(), x.grade(), x.order());
  for (const auto& [l, c] : x.modes()) {
    if (is_zero_vector(l)) continue;
    const auto p = coclosed_projector(s, x.grade(), components, l);
    out.set_mode(l, apply_matrix(p, c, x.grade()));
  }
  return out;
}

CForm dd_star(const CForm& x) { return exterior_d(coexterior_d(x)); }
CForm d_star_d(const CForm& x) { return coexterior_d(exterior_d(x)); }

}  // namespace

HessianBlocks hessian_blocks(HessianKind kind, const FourierForm<Complex>& f) {
  const int grade = kind == HessianKind::E ? 2 : 3;
  if (f.grade() != grade)
    throw GradeError(std::string(kind == HessianKind::E ? "E" : "F") + " acts on " + std::to_string(grade) + "-forms");

  HessianBlocks out{{}, CForm(f.structure_ptr(), grade, f.order() + 2), 0.0};
  const CForm harmonic = harmonic_part(f);
  const CForm rest = f - harmonic;
  const CForm g = green(rest);
  const CForm exact = exterior_d(coexterior_d(g));
  const CForm coexact = coexterior_d(exterior_d(g));

  out.blocks.push_back({"harmonic", harmonic, harmonic});
  out.blocks.push_back({"exact", exact, dd_star(exact)});
  if (kind == HessianKind::E) {
    const CForm c14 = project_coclosed_type(coexact, {14});
    const CForm c7 = coexact - c14;
    out.blocks.push_back({"coexact type 7", c7, d_star_d(c7)});
    out.blocks.push_back({"coexact type 14", c14, Complex(-1.0) * d_star_d(c14)});
    out.direct = laplacian(rest) + Complex(2.0) * coexterior_d(apply_I(exterior_d(rest)));
  } else {
    const CForm c127 = project_coclosed_type(coexact, {1, 27});
    const CForm c7 = coexact - c127;
    auto [plus, minus] = split_S4(c127);
    out.blocks.push_back({"coexact type 7", c7, d_star_d(c7)});
    out.blocks.push_back({"S+", plus, Complex(3.0) * d_star_d(plus)});
    out.blocks.push_back({"S-", minus, Complex(-1.0) * d_star_d(minus)});
    out.direct = laplacian(rest) + Complex(2.0) * coexterior_d(apply_J(exterior_d(rest)));
  }

  CForm sum_components(f.structure_ptr(), grade, f.order());
  CForm sum_actions(f.structure_ptr(), grade, f.order() + 2);
  for (std::size_t i = 1; i < out.blocks.size(); ++i) {
    sum_components += out.blocks[i].component;
    sum_actions += out.blocks[i].action;
  }
  sum_components += harmonic;
  out.residual = std::max(max_difference(sum_components, f), max_difference(sum_actions, out.direct));
  return out;
}

std::vector<IdentityResidual> hessian_residuals(std::shared_ptr<const G2Structure<double>> s, std::size_t trials,
                                                std::uint64_t seed, const RandomFormOptions& opts) {
  if (trials < 1) throw InputError("hessian_residuals needs at least one trial");
  std::vector<IdentityResidual> out;
  for (std::size_t t = 0; t < trials; ++t) {
    // Offset the stream so these inputs differ from the identity suite's.
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(t), 0x4e55u};
    std::mt19937_64 rng(seq);
    std::vector<IdentityResidual> r;

    const CForm beta = random_coclosed_form(s, 2, {14}, rng, opts);
    const CForm d_beta = exterior_d(beta);
    r.push_back({"hessian: d*Id = -d*d on coexact type 14",
                 max_difference(coexterior_d(apply_I(d_beta)), Complex(-1.0) * coexterior_d(d_beta))});

    RandomFormOptions with_constant = opts;
    with_constant.include_constant = true;
    const CForm two = random_form(s, {2, 7}, rng, with_constant) + random_form(s, {2, 14}, rng, with_constant);
    r.push_back({"hessian: E block table", hessian_blocks(HessianKind::E, two).residual});
    const CForm three = random_form(s, {3, 1}, rng, with_constant) + random_form(s, {3, 7}, rng, with_constant) +
                        random_form(s, {3, 27}, rng, with_constant);
    r.push_back({"hessian: F block table", hessian_blocks(HessianKind::F, three).residual});

    const CForm omega = random_coclosed_form(s, 3, {1, 27}, rng, opts);
    const auto [plus, minus] = split_S4(omega);
    r.push_back({"split: pi27 d omega+ = 0", project(exterior_d(plus), {4, 27}).max_magnitude()});
    r.push_back({"split: pi7 d omega- = 0", project(exterior_d(minus), {4, 7}).max_magnitude()});
    r.push_back({"split: <omega+, omega-> = 0", std::abs(l2_inner(plus, minus).value)});
    r.push_back({"split: omega+ + omega- = omega", max_difference(plus + minus, omega)});

    if (out.empty()) {
      out = r;
    } else {
      for (std::size_t i = 0; i < r.size(); ++i) out[i].residual = std::max(out[i].residual, r[i].residual);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Instantiations

#define G2MU_FOURIER(S)                                                                          \
  template class FourierForm<S>;                                                                 \
  template FourierForm<S> exterior_d(const FourierForm<S>&);                                     \
  template FourierForm<S> coexterior_d(const FourierForm<S>&);                                   \
  template FourierForm<S> laplacian(const FourierForm<S>&);                                      \
  template FourierForm<S> green(const FourierForm<S>&);                                          \
  template FourierForm<S> harmonic_part(const FourierForm<S>&);                                  \
  template FourierForm<S> hodge_star(const FourierForm<S>&);                                     \
  template FourierForm<S> wedge_constant(const FourierForm<S>&, const ExteriorForm<RealOf<S>>&); \
  template FourierForm<S> project(const FourierForm<S>&, TypeLabel);                             \
  template FourierForm<S> apply_I(const FourierForm<S>&);                                        \
  template FourierForm<S> apply_J(const FourierForm<S>&);                                        \
  template FactoredScalar<S> l2_inner(const FourierForm<S>&, const FourierForm<S>&);             \
  template double max_difference(const FourierForm<S>&, const FourierForm<S>&);                  \
  template FourierForm<S> refined(RefinedOp, const FourierForm<S>&, bool);                       \
  template std::vector<IdentityResidual> identity_residuals(const IdentityInputs<S>&, bool);           \
  template std::pair<FourierForm<S>, FourierForm<S>> split_S4(const FourierForm<S>&);

G2MU_FOURIER(Rational)
G2MU_FOURIER(Complex)

template Matrix<Rational> refined_symbol(const G2Structure<Rational>&, RefinedOp, const LatticeVector&);
template Matrix<double> refined_symbol(const G2Structure<double>&, RefinedOp, const LatticeVector&);

}  // namespace g2mu
