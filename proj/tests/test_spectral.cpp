#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "g2mu/invariants.hpp"
#include "g2mu/spectral.hpp"
#include "test_support.hpp"

using namespace g2mu;
using namespace g2mu::testing;

namespace {

constexpr double kPi = 3.141592653589793238462643383279;

LatticeVector e(int i, std::int64_t c = 1) {
  LatticeVector l{};
  l[i - 1] = c;
  return l;
}

LatticeVector negate(LatticeVector l) {
  for (auto& x : l) x = -x;
  return l;
}

// Block diagonal for the ±1 eigenspaces of α, so α stays compatible.
Matrix<Rational> alpha_frame() {
  auto f = diagonal({1, 2, 1, 1, 3, 1, Rational(1, 2)});
  f(0, 1) = Rational(1, 2);
  f(4, 6) = Rational(-1, 3);
  return f;
}

}  // namespace

TEST(EnumerateClasses, EuclideanCounts) {
  const auto o = example_orbifold({});
  const auto one = enumerate_classes(o, Rational(1));
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].norm_sq, 1);
  EXPECT_EQ(one[0].vectors.size(), 14u);
  const auto two = enumerate_classes(o, Rational(2));
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[0].vectors.size(), 14u);
  EXPECT_EQ(two[1].norm_sq, 2);
  EXPECT_EQ(two[1].vectors.size(), 84u);
  EXPECT_TRUE(enumerate_classes(o, Rational(0)).empty());
  EXPECT_TRUE(enumerate_classes(o, Rational(-3)).empty());
}

TEST(EnumerateClasses, SortedPairedAndHomogeneous) {
  const auto o = example_orbifold({alpha()}, alpha_frame());
  const auto classes = enumerate_classes(o, Rational(5));
  ASSERT_GT(classes.size(), 3u);
  for (std::size_t c = 0; c < classes.size(); ++c) {
    if (c) EXPECT_LT(classes[c - 1].norm_sq, classes[c].norm_sq);
    EXPECT_GT(classes[c].norm_sq, 0);
    EXPECT_LE(classes[c].norm_sq, 5);
    for (const auto& k : classes[c].vectors) {
      EXPECT_EQ(mode_norm_sq(o.structure, k), classes[c].norm_sq);
      EXPECT_NE(std::find(classes[c].vectors.begin(), classes[c].vectors.end(), negate(k)), classes[c].vectors.end());
    }
  }
}

TEST(GroupAction, Examples) {
  const auto s = G2Structure<Rational>::standard();
  const auto alpha_form = ExteriorForm<Rational>::basis_form(MultiIndex::parse("23"));
  const auto id = group_action_on_mode(s, AffineElement(), e(3), alpha_form);
  EXPECT_EQ(id.phase, 0);
  EXPECT_EQ(id.k_out, e(3));
  EXPECT_EQ(id.alpha_out, alpha_form);

  const AffineElement shift(Matrix<Rational>::identity(kDim), translation({{7, half()}}));
  const auto shifted = group_action_on_mode(s, shift, e(7), alpha_form);
  EXPECT_EQ(shifted.phase, half());  // e^{πi} = −1
  EXPECT_EQ(shifted.k_out, e(7));

  const auto moved = group_action_on_mode(s, alpha(), e(4), alpha_form);
  EXPECT_EQ(moved.k_out, e(4, -1));
  EXPECT_TRUE(moved.transpose_rule_agrees);
}

TEST(GroupAction, PreservesNormClasses) {
  for (const auto& frame : {Matrix<Rational>::identity(kDim), alpha_frame()}) {
    const auto o = frame == Matrix<Rational>::identity(kDim) ? example_orbifold({alpha(), beta(), gamma()})
                                                             : example_orbifold({alpha()}, frame);
    const auto a = ExteriorForm<Rational>::basis_form(MultiIndex::parse("145"));
    for (const auto& cls : enumerate_classes(o, Rational(2)))
      for (const auto& k : cls.vectors)
        for (const auto& g : o.group.elements())
          EXPECT_EQ(mode_norm_sq(o.structure, group_action_on_mode(o.structure, g, k, a).k_out), cls.norm_sq);
  }
}

TEST(TransposeRule, AgreesForIsometriesOfTheStandardMetricOnly) {
  const auto s = G2Structure<Rational>::standard();
  const auto group = generate({alpha(), beta(), gamma()});
  for (const auto& g : group.elements())
    for (int i = 1; i <= kDim; ++i) EXPECT_TRUE(transpose_rule_agrees(s, g.matrix(), e(i)));
  // A shear is not an isometry of anything here; the two rules then differ.
  auto shear = Matrix<Rational>::identity(kDim);
  shear(0, 1) = 1;
  const G2Structure<Rational> skew(alpha_frame());
  bool any_disagreement = false;
  for (int i = 1; i <= kDim; ++i) any_disagreement |= !transpose_rule_agrees(skew, shear, e(i));
  EXPECT_TRUE(any_disagreement);
}

TEST(ModeSpace, DimensionsTypesAndCoclosedness) {
  for (const auto& frame : {Matrix<Rational>::identity(kDim), alpha_frame()}) {
    auto s = std::make_shared<const G2Structure<Rational>>(frame);
    ModeSpaceCache cache(s);
    for (const LatticeVector& k : {e(1), LatticeVector{1, -1, 0, 2, 0, 0, 3}, LatticeVector{0, 2, 2, 0, -1, 1, 0}}) {
      for (auto kind : {ModeKind::H, ModeKind::Hprime}) {
        const auto& space = cache.get(kind, k);
        EXPECT_EQ(static_cast<int>(space.dimension()), mode_dimension(kind));
        const TypeLabel label = kind == ModeKind::H ? TypeLabel{2, 14} : TypeLabel{3, 27};
        for (const auto& b : space.basis()) {
          EXPECT_EQ(s->project(label, b), b);
          FourierForm<Rational> f(s, label.grade);
          f.set_mode(k, b);
          EXPECT_TRUE(coexterior_d(f).is_zero());
          // Eigenvalue: Δ(χ_k α) = 4π²‖l‖² χ_k α, stored as −‖l‖² at order 2.
          const auto lf = laplacian(f);
          EXPECT_EQ(lf.order(), 2);
          EXPECT_EQ(lf.mode(k), Rational(-1) * mode_norm_sq(*s, k) * b);
        }
      }
    }
    EXPECT_EQ(cache.size(), 6u);
  }
}

TEST(ModeSpace, FloatingEigenvalueCheck) {
  auto s = std::make_shared<const G2Structure<Rational>>(alpha_frame());
  auto sd = std::make_shared<const G2Structure<double>>(alpha_frame().cast<double>());
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const LatticeVector k{1, 0, -2, 1, 0, 1, 0};
  for (auto kind : {ModeKind::H, ModeKind::Hprime}) {
    const auto space = build_mode_space(*s, kind, k);
    ExteriorForm<Complex> a(kind == ModeKind::H ? 2 : 3);
    for (const auto& b : space.basis()) {
      const Complex c(u(rng), u(rng));
      for (std::size_t i = 0; i < b.size(); ++i) a.coeffs()[i] += c * to_double(b.coeffs()[i]);
    }
    FourierForm<Complex> f(sd, a.grade());
    f.set_mode(k, a);
    const auto lf = laplacian(f).materialize();
    const double eigen = 4 * kPi * kPi * to_double(mode_norm_sq(*s, k));
    EXPECT_LE(max_difference(lf, Complex(eigen) * f), 1e-9 * eigen);
  }
}

TEST(InvariantDimension, WorkedValues) {
  const auto t7 = example_orbifold({});
  const auto m1 = example_orbifold({alpha()});
  const auto cls = enumerate_classes(t7, Rational(1)).at(0);
  EXPECT_EQ(invariant_dimension_bruteforce(t7, cls, ModeKind::H), 112);
  EXPECT_EQ(invariant_dimension_formula(t7, cls, ModeKind::H), 112);
  EXPECT_EQ(invariant_dimension_bruteforce(t7, cls, ModeKind::Hprime), 168);
  EXPECT_EQ(invariant_dimension_formula(t7, cls, ModeKind::Hprime), 168);
  EXPECT_EQ(invariant_dimension_bruteforce(m1, cls, ModeKind::H), 56);
  EXPECT_EQ(invariant_dimension_formula(m1, cls, ModeKind::H), 56);
  const auto m3 = example_orbifold({alpha(), beta(), gamma()});
  EXPECT_EQ(invariant_dimension_formula(m3, cls, ModeKind::H), invariant_dimension_bruteforce(m3, cls, ModeKind::H));
}

TEST(InvariantDimension, FirstTwoClassesOfEachExample) {
  const std::vector<std::array<std::int64_t, 4>> expected = {
      {112, 168, 672, 1008}, {56, 96, 336, 528}, {28, 56, 168, 272}, {14, 34, 84, 136}};
  const auto exs = examples();
  for (std::size_t i = 0; i < exs.size(); ++i) {
    const auto o = example_orbifold(exs[i].generators);
    const auto records = spectral_report(o, Rational(2));
    ASSERT_EQ(records.size(), 4u);
    for (std::size_t r = 0; r < 4; ++r) {
      EXPECT_EQ(records[r].dim_bruteforce, expected[i][r]) << exs[i].name << " record " << r;
      EXPECT_TRUE(records[r].match());
    }
  }
}

TEST(InvariantDimension, FormulaMatchesBruteForceWithNonEuclideanFrame) {
  const auto o = example_orbifold({alpha()}, alpha_frame());
  ModeSpaceCache cache(std::make_shared<const G2Structure<Rational>>(o.structure));
  const auto records = spectral_report(o, Rational(3), &cache);
  ASSERT_FALSE(records.empty());
  for (const auto& r : records)
    EXPECT_TRUE(r.match()) << format_rational(r.norm_sq) << " " << name(r.kind) << ": " << r.dim_bruteforce
                           << " vs " << r.dim_formula;
}

TEST(InvariantDimension, OnlyIdentityFixesGenericClass) {
  // For M₃ and a class where no non-identity element fixes any vector, the
  // dimension is |class|·8/|Γ| (the shifts permute modes freely).
  const auto m3 = example_orbifold({alpha(), beta(), gamma()});
  for (const auto& cls : enumerate_classes(m3, Rational(4))) {
    bool only_identity = true;
    for (const auto& k : cls.vectors)
      for (std::size_t g = 1; g < m3.group.order(); ++g) {
        const auto out = group_action_on_mode(m3.structure, m3.group[g], k, ExteriorForm<Rational>(2));
        if (out.k_out == k) only_identity = false;
      }
    if (!only_identity) continue;
    const auto expected = static_cast<std::int64_t>(cls.vectors.size() * 8 / m3.group.order());
    EXPECT_EQ(invariant_dimension_formula(m3, cls, ModeKind::H), expected);
    EXPECT_EQ(invariant_dimension_bruteforce(m3, cls, ModeKind::H), expected);
  }
}

TEST(Su3Traces, Examples) {
  const auto m1 = example_orbifold({alpha()});
  const auto id = su3_trace_check(m1, AffineElement(), LatticeVector{1, 2, 0, -1, 0, 3, 1});
  EXPECT_EQ(id.trace8, 8);
  EXPECT_EQ(id.trace12, 12);
  EXPECT_EQ(id.residual8, 0);
  EXPECT_EQ(id.residual12, 0);
  const auto a = su3_trace_check(m1, alpha(), e(1));
  EXPECT_EQ(a.trace8, 0);
  EXPECT_EQ(a.trace12, 4);
  EXPECT_EQ(a.residual8, 0);
  EXPECT_EQ(a.residual12, 0);
  EXPECT_THROW(su3_trace_check(m1, alpha(), e(4)), NotFixed);
  EXPECT_THROW(su3_trace_check(m1, alpha(), LatticeVector{}), NotFixed);
}

TEST(Su3Traces, EveryFixedUnitVectorInEveryExample) {
  for (const auto& ex : examples()) {
    const auto o = example_orbifold(ex.generators);
    for (const auto& g : o.group.elements()) {
      for (int i = 1; i <= kDim; ++i) {
        for (int sign : {1, -1}) {
          const auto k = e(i, sign);
          bool fixed = true;
          for (int r = 0; r < kDim; ++r) fixed &= g.matrix()(r, i - 1) == (r == i - 1 ? 1 : 0);
          if (!fixed) {
            EXPECT_THROW(su3_trace_check(o, g, k), NotFixed);
            continue;
          }
          const auto t = su3_trace_check(o, g, k);
          EXPECT_EQ(t.residual8, 0) << ex.name;
          EXPECT_EQ(t.residual12, 0) << ex.name;
          EXPECT_EQ(t.trace8, tr8_su3(g.matrix()));
          EXPECT_EQ(t.trace12, tr12_su3(g.matrix()));
        }
      }
    }
  }
}

TEST(PartialMorseSum, Examples) {
  const auto t7 = example_orbifold({});
  const double expected = 112.0 / std::pow(4 * kPi * kPi, 5.0);
  EXPECT_NEAR(partial_morse_sum(t7, MorseKind::mu3, 5.0, Rational(1)), expected, 1e-15 * expected);
  EXPECT_EQ(partial_morse_sum(t7, MorseKind::mu3, 5.0, Rational(0)), 0.0);
  EXPECT_THROW(partial_morse_sum(t7, MorseKind::mu3, 3.5, Rational(1)), ConvergenceRegionViolated);
  EXPECT_THROW(partial_morse_sum(t7, MorseKind::mu4, 1.0, Rational(1)), ConvergenceRegionViolated);
}

TEST(PartialMorseSum, RoutesAgreeAndSumIsMonotone) {
  for (const auto& ex : examples()) {
    const auto o = example_orbifold(ex.generators);
    ModeSpaceCache cache(std::make_shared<const G2Structure<Rational>>(o.structure));
    for (auto kind : {MorseKind::mu3, MorseKind::mu4}) {
      double previous = 0.0;
      for (int r = 1; r <= 3; ++r) {
        const double brute = partial_morse_sum(o, kind, 4.0, Rational(r), DimensionRoute::bruteforce, &cache);
        const double formula = partial_morse_sum(o, kind, 4.0, Rational(r), DimensionRoute::formula);
        EXPECT_EQ(brute, formula) << ex.name;
        EXPECT_GE(brute, previous);
        previous = brute;
      }
    }
  }
}

TEST(PhaseSum, ExactRootsOfUnity) {
  PhaseSum a;
  a.add(Rational(0), Rational(1));
  a.add(half(), Rational(1));
  ASSERT_TRUE(a.exact_rational());
  EXPECT_EQ(*a.exact_rational(), 0);

  PhaseSum b;
  for (int j = 0; j < 3; ++j) b.add(Rational(j, 3), Rational(2));
  ASSERT_TRUE(b.exact_rational());
  EXPECT_EQ(*b.exact_rational(), 0);

  PhaseSum c;
  c.add(Rational(1, 4), Rational(1));  // i
  EXPECT_TRUE(c.is_exact());
  EXPECT_FALSE(c.exact_rational());
  c.add(Rational(3, 4), Rational(1));  // −i
  EXPECT_EQ(*c.exact_rational(), 0);

  PhaseSum d;
  d.add(Rational(1, 6), Rational(1));
  d.add(Rational(5, 6), Rational(1));  // 2cos(π/3) = 1
  EXPECT_EQ(*d.exact_rational(), 1);
  d.add(Rational(7, 4), Rational(3));  // exponent reduced mod 1
  EXPECT_NEAR(std::abs(d.value() - Complex(1.0, -3.0)), 0.0, 1e-14);
}

TEST(PhaseSum, FloatingFallback) {
  PhaseSum s;
  for (int j = 0; j < 5; ++j) s.add(Rational(j, 5), Rational(1));
  EXPECT_FALSE(s.is_exact());
  EXPECT_NEAR(std::abs(s.value()), 0.0, 1e-14);
}
