#include "g2mu/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "g2mu/invariants.hpp"
#include "g2mu/lattice.hpp"

namespace g2mu {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;

Vec7<Rational> to_rational_vec(const LatticeVector& k) { return to_vec<Rational>(k); }

std::vector<Rational> as_vector(const Vec7<Rational>& v) { return {v.begin(), v.end()}; }

Vec7<Rational> sharp(const G2Structure<Rational>& s, const LatticeVector& k) {
  const auto v = g2mu::apply(s.metric().inverse_gram(), as_vector(to_rational_vec(k)));
  Vec7<Rational> out;
  std::copy(v.begin(), v.end(), out.begin());
  return out;
}

Rational dot(const LatticeVector& k, const Vec7<Rational>& t) {
  Rational acc(0);
  for (int i = 0; i < kDim; ++i) acc += Rational(static_cast<long>(k[i])) * t[i];
  return acc;
}

LatticeVector transpose_apply(const Matrix<Rational>& a, const LatticeVector& k) {
  LatticeVector out{};
  for (int j = 0; j < kDim; ++j) {
    Rational acc(0);
    for (int i = 0; i < kDim; ++i) acc += a(i, j) * Rational(static_cast<long>(k[i]));
    if (denominator(acc) != 1) throw std::logic_error("Aᵀk is not integral");
    out[j] = numerator(acc).convert_to<std::int64_t>();
  }
  return out;
}

bool is_zero_vector(const LatticeVector& k) {
  return std::all_of(k.begin(), k.end(), [](std::int64_t x) { return x == 0; });
}

int grade_of(ModeKind kind) { return kind == ModeKind::H ? 2 : 3; }

std::vector<std::vector<Int128>> constant_rows(const G2Structure<Rational>& s, ModeKind kind) {
  if (kind == ModeKind::H) return integral_rows(wedge_matrix(s.psi(), 2));
  return integral_rows(vstack(wedge_matrix(s.phi(), 3), wedge_matrix(s.psi(), 3)));
}

/// Rows of a ↦ l⌟a on Λ^grade for l ∥ G⁻¹k, scaled to integers. Rescaling l
/// does not change the kernel.
std::vector<std::vector<Int128>> contraction_rows(const G2Structure<Rational>& s, const LatticeVector& k, int grade) {
  const auto l = sharp(s, k);
  Integer common(1);
  for (const auto& x : l) common = boost::multiprecision::lcm(common, Integer(denominator(x)));
  std::array<Int128, kDim> v{};
  for (int i = 0; i < kDim; ++i) {
    const Rational scaled = l[i] * Rational(common);
    v[i] = static_cast<Int128>(numerator(scaled).convert_to<long long>());
  }
  const auto& src = basis(grade);
  std::vector<std::vector<Int128>> rows(basis_size(grade - 1), std::vector<Int128>(src.size(), 0));
  for (std::size_t col = 0; col < src.size(); ++col) {
    const auto idx = src[col].indices();
    for (std::size_t pos = 0; pos < idx.size(); ++pos) {
      const int i = idx[pos];
      const auto rest = MultiIndex::from_mask(static_cast<std::uint8_t>(src[col].mask() & ~(1u << (i - 1))));
      const Int128 sign = pos % 2 ? -1 : 1;
      rows[position(rest)][col] += sign * v[i - 1];
    }
  }
  return rows;
}

ModeSpace make_space(const G2Structure<Rational>& s, ModeKind kind, const LatticeVector& k,
                     std::vector<std::vector<Int128>> rows) {
  const int grade = grade_of(kind);
  if (!is_zero_vector(k)) {
    const auto contraction = contraction_rows(s, k, grade);
    rows.insert(rows.end(), contraction.begin(), contraction.end());
  }
  ModeSpace space{kind, k, scaled_kernel(rows, basis_size(grade))};
  if (!is_zero_vector(k) && static_cast<int>(space.dimension()) != mode_dimension(kind))
    throw std::logic_error("mode space at " + to_string(k) + " has dimension " + std::to_string(space.dimension()));
  return space;
}

/// Trace of the pullback matrix restricted to an invariant mode space.
Rational restricted_trace(const ModeSpace& space, const Matrix<Rational>& pullback) {
  const auto& ker = space.kernel;
  const Rational scale = to_rational(ker.scale);
  std::vector<std::vector<Rational>> basis;
  for (const auto& v : ker.vectors) {
    std::vector<Rational> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) r[i] = to_rational(v[i]);
    basis.push_back(std::move(r));
  }
  Rational trace(0);
  for (std::size_t j = 0; j < basis.size(); ++j) {
    const auto y = g2mu::apply(pullback, basis[j]);
    // Coordinates in the reduced basis are read off at the free columns.
    std::vector<Rational> coords(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) coords[i] = y[ker.free_columns[i]] / scale;
    for (std::size_t r = 0; r < y.size(); ++r) {
      Rational acc(0);
      for (std::size_t i = 0; i < basis.size(); ++i) acc += coords[i] * basis[i][r];
      if (acc != y[r]) throw std::logic_error("pullback does not preserve the mode space at " + to_string(space.k));
    }
    trace += coords[j];
  }
  return trace;
}

std::int64_t to_dimension(const PhaseSum& sum, std::size_t order, const char* route) {
  if (auto exact = sum.exact_rational()) {
    const Rational d = *exact / Rational(static_cast<long>(order));
    if (denominator(d) != 1 || d < 0)
      throw NonIntegerDimension(std::string(route) + " dimension " + format_rational(d) + " is not a nonnegative integer");
    return numerator(d).convert_to<std::int64_t>();
  }
  const Complex v = sum.value() / static_cast<double>(order);
  const double r = std::round(v.real());
  if (std::abs(v.real() - r) > 1e-9 * std::max(1.0, std::abs(r)) || std::abs(v.imag()) > 1e-9 || r < 0)
    throw NonIntegerDimension(std::string(route) + " dimension " + std::to_string(v.real()) + " is not an integer");
  return static_cast<std::int64_t>(r);
}

}  // namespace

std::string_view name(ModeKind kind) { return kind == ModeKind::H ? "H" : "H'"; }

int mode_dimension(ModeKind kind) { return kind == ModeKind::H ? 8 : 12; }

Rational mode_norm_sq(const G2Structure<Rational>& s, const LatticeVector& k) {
  const auto l = sharp(s, k);
  return dot(k, l);
}

std::vector<EigenClass> enumerate_classes(const G2Structure<Rational>& s, const Rational& radius_sq) {
  if (radius_sq <= 0) return {};
  const auto& inv = s.metric().inverse_gram();
  std::vector<std::vector<double>> q(kDim, std::vector<double>(kDim));
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) q[i][j] = to_double(inv(i, j));
  std::map<Rational, std::vector<LatticeVector>> grouped;
  for_each_short_vector(q, to_double(radius_sq), [&](const IntVector& x, double) {
    LatticeVector k;
    std::copy(x.begin(), x.end(), k.begin());
    const Rational n = mode_norm_sq(s, k);
    if (n <= radius_sq) grouped[n].push_back(k);
  });
  std::vector<EigenClass> out;
  for (auto& [n, vs] : grouped) {
    std::sort(vs.begin(), vs.end());
    out.push_back({n, std::move(vs)});
  }
  return out;
}

bool transpose_rule_agrees(const G2Structure<Rational>& s, const Matrix<Rational>& a, const LatticeVector& k) {
  const auto l_out = sharp(s, transpose_apply(a, k));
  const auto naive = g2mu::apply(a.transpose(), as_vector(sharp(s, k)));
  return std::equal(naive.begin(), naive.end(), l_out.begin());
}

ModeAction group_action_on_mode(const G2Structure<Rational>& s, const AffineElement& a, const LatticeVector& k,
                                 const ExteriorForm<Rational>& alpha) {
  ModeAction out;
  const auto& m = a.matrix();
  out.phase = mod1(dot(k, a.translation()));
  out.k_out = transpose_apply(m, k);
  out.transpose_rule_agrees = transpose_rule_agrees(s, m, k);
  out.alpha_out = pullback(m, alpha);
  return out;
}

std::vector<ExteriorForm<Rational>> ModeSpace::basis() const {
  const Rational scale = to_rational(kernel.scale);
  std::vector<ExteriorForm<Rational>> out;
  for (const auto& v : kernel.vectors) {
    std::vector<Rational> c(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) c[i] = to_rational(v[i]) / scale;
    out.emplace_back(grade_of(kind), std::move(c));
  }
  return out;
}

ModeSpace build_mode_space(const G2Structure<Rational>& s, ModeKind kind, const LatticeVector& k) {
  return make_space(s, kind, k, constant_rows(s, kind));
}

ModeSpaceCache::ModeSpaceCache(std::shared_ptr<const G2Structure<Rational>> s)
    : structure_(std::move(s)),
      fixed_rows_h_(constant_rows(*structure_, ModeKind::H)),
      fixed_rows_hprime_(constant_rows(*structure_, ModeKind::Hprime)) {}

const ModeSpace& ModeSpaceCache::get(ModeKind kind, const LatticeVector& k) {
  const auto key = std::make_pair(static_cast<int>(kind), k);
  {
    std::lock_guard lock(mutex_);
    const auto it = spaces_.find(key);
    if (it != spaces_.end()) return *it->second;
  }
  auto space = std::make_unique<ModeSpace>(
      make_space(*structure_, kind, k, kind == ModeKind::H ? fixed_rows_h_ : fixed_rows_hprime_));
  std::lock_guard lock(mutex_);
  auto [it, inserted] = spaces_.emplace(key, std::move(space));
  return *it->second;
}

std::size_t ModeSpaceCache::size() const {
  std::lock_guard lock(mutex_);
  return spaces_.size();
}

// ---------------------------------------------------------------------------
// PhaseSum

namespace {

// cos and sin of 2πm/12 as a + b√3.
struct QuadraticPair {
  Rational cos_a, cos_b, sin_a, sin_b;
};

QuadraticPair twelfth_root(int m) {
  const Rational h(1, 2);
  switch (m % 12) {
    case 0: return {1, 0, 0, 0};
    case 1: return {0, h, h, 0};
    case 2: return {h, 0, 0, h};
    case 3: return {0, 0, 1, 0};
    case 4: return {-h, 0, 0, h};
    case 5: return {0, -h, h, 0};
    case 6: return {-1, 0, 0, 0};
    case 7: return {0, -h, -h, 0};
    case 8: return {-h, 0, 0, -h};
    case 9: return {0, 0, -1, 0};
    case 10: return {h, 0, 0, -h};
    default: return {0, h, -h, 0};
  }
}

}  // namespace

void PhaseSum::add(const Rational& exponent, const Rational& weight) {
  if (weight == 0) return;
  auto& w = terms_[mod1(exponent)];
  w += weight;
  if (w == 0) terms_.erase(mod1(exponent));
}

bool PhaseSum::is_exact() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return 12 % denominator(t.first) == 0; });
}

std::optional<Rational> PhaseSum::exact_rational() const {
  if (!is_exact()) return std::nullopt;
  Rational re_a(0), re_b(0), im_a(0), im_b(0);
  for (const auto& [q, w] : terms_) {
    const auto m = numerator(q * 12).convert_to<int>();
    const auto r = twelfth_root(m);
    re_a += w * r.cos_a;
    re_b += w * r.cos_b;
    im_a += w * r.sin_a;
    im_b += w * r.sin_b;
  }
  if (re_b != 0 || im_a != 0 || im_b != 0) return std::nullopt;
  return re_a;
}

Complex PhaseSum::value() const {
  Complex acc(0.0, 0.0);
  for (const auto& [q, w] : terms_) acc += to_double(w) * std::polar(1.0, 2.0 * kPi * to_double(q));
  return acc;
}

// ---------------------------------------------------------------------------
// Invariant dimensions

std::int64_t invariant_dimension_bruteforce(const JoyceOrbifold& o, const EigenClass& cls, ModeKind kind,
                                            ModeSpaceCache* cache) {
  std::unique_ptr<ModeSpaceCache> local;
  if (!cache) {
    local = std::make_unique<ModeSpaceCache>(std::make_shared<const G2Structure<Rational>>(o.structure));
    cache = local.get();
  }
  const int grade = grade_of(kind);
  for (const auto& k : cls.vectors)
    if (mode_norm_sq(o.structure, k) != cls.norm_sq) throw std::logic_error("eigen class with mixed norms");
  PhaseSum sum;
  for (const auto& a : o.group.elements()) {
    const bool identity = a.matrix() == Matrix<Rational>::identity(kDim);
    const auto pb = pullback_matrix(a.matrix(), grade);
    for (const auto& k : cls.vectors) {
      if (!identity && transpose_apply(a.matrix(), k) != k) continue;  // block moves to another mode: zero trace
      const auto& space = cache->get(kind, k);
      const Rational trace = identity ? Rational(static_cast<long>(space.dimension())) : restricted_trace(space, pb);
      sum.add(dot(k, a.translation()), trace);
    }
  }
  return to_dimension(sum, o.group.order(), "brute-force");
}

std::int64_t invariant_dimension_formula(const JoyceOrbifold& o, const EigenClass& cls, ModeKind kind) {
  std::vector<std::vector<Rational>> vectors;
  for (const auto& k : cls.vectors) vectors.push_back(as_vector(sharp(o.structure, k)));
  PhaseSum sum;
  for (const auto& a : o.group.elements()) {
    const auto& m = a.matrix();
    const Rational tr = kind == ModeKind::H ? tr8_su3(m) : tr12_su3(m);
    for (std::size_t j = 0; j < vectors.size(); ++j) {
      if (g2mu::apply(m, vectors[j]) != vectors[j]) continue;
      // g(l, t) = k·t
      sum.add(dot(cls.vectors[j], a.translation()), tr);
    }
  }
  return to_dimension(sum, o.group.order(), "formula");
}

TraceCheck su3_trace_check(const JoyceOrbifold& o, const AffineElement& a, const LatticeVector& k) {
  if (is_zero_vector(k)) throw NotFixed("the zero frequency is not admissible");
  const auto l = sharp(o.structure, k);
  const auto moved = g2mu::apply(a.matrix(), as_vector(l));
  if (!std::equal(moved.begin(), moved.end(), l.begin()))
    throw NotFixed("A does not fix the mode " + to_string(k));
  TraceCheck out;
  out.trace8 = restricted_trace(build_mode_space(o.structure, ModeKind::H, k), pullback_matrix(a.matrix(), 2));
  out.trace12 = restricted_trace(build_mode_space(o.structure, ModeKind::Hprime, k), pullback_matrix(a.matrix(), 3));
  out.residual8 = abs(out.trace8 - tr8_su3(a.matrix()));
  out.residual12 = abs(out.trace12 - tr12_su3(a.matrix()));
  return out;
}

double partial_morse_sum(const JoyceOrbifold& o, MorseKind kind, double s, const Rational& radius_sq,
                         DimensionRoute route, ModeSpaceCache* cache) {
  if (!(s > 3.5)) throw ConvergenceRegionViolated("partial Morse sums need s > 7/2, got " + std::to_string(s));
  const ModeKind mode = kind == MorseKind::mu3 ? ModeKind::H : ModeKind::Hprime;
  double total = 0.0;
  for (const auto& cls : enumerate_classes(o, radius_sq)) {
    const auto dim = route == DimensionRoute::bruteforce ? invariant_dimension_bruteforce(o, cls, mode, cache)
                                                         : invariant_dimension_formula(o, cls, mode);
    total += static_cast<double>(dim) / std::pow(4.0 * kPi * kPi * to_double(cls.norm_sq), s);
  }
  return total;
}

std::vector<SpectralRecord> spectral_report(const JoyceOrbifold& o, const Rational& radius_sq, ModeSpaceCache* cache) {
  std::unique_ptr<ModeSpaceCache> local;
  if (!cache) {
    local = std::make_unique<ModeSpaceCache>(std::make_shared<const G2Structure<Rational>>(o.structure));
    cache = local.get();
  }
  std::vector<SpectralRecord> out;
  for (const auto& cls : enumerate_classes(o, radius_sq)) {
    for (auto kind : {ModeKind::H, ModeKind::Hprime}) {
      SpectralRecord r{cls.norm_sq, kind, cls.vectors.size()};
      r.dim_bruteforce = invariant_dimension_bruteforce(o, cls, kind, cache);
      r.dim_formula = invariant_dimension_formula(o, cls, kind);
      out.push_back(r);
    }
  }
  return out;
}

}  // namespace g2mu
