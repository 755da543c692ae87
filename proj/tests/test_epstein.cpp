#include <cmath>
#include <random>

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/zeta.hpp>
#include <gtest/gtest.h>

#include "g2mu/epstein.hpp"
#include "g2mu/invariants.hpp"
#include "g2mu/lattice.hpp"
#include "test_support.hpp"

using namespace g2mu;
using namespace g2mu::testing;

namespace {

constexpr double kPi = boost::math::constants::pi<double>();

Matrix<double> gram_of(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix<double> g(rows.size(), rows.size());
  std::size_t i = 0;
  for (const auto& row : rows) {
    std::size_t j = 0;
    for (double x : row) g(i, j++) = x;
    ++i;
  }
  return g;
}

std::vector<std::vector<double>> rows_of(const Matrix<double>& g) {
  std::vector<std::vector<double>> q(g.rows(), std::vector<double>(g.cols()));
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j) q[i][j] = g(i, j);
  return q;
}

// Σ over 0 < Q[n] ≤ bound of e^{2πi n·q} Q[n]^{−s}.
Complex direct_sum(const TwistedLattice& lat, double s, double bound) {
  Complex total = 0.0;
  for_each_short_vector(rows_of(lat.gram), bound, [&](const IntVector& n, double norm) {
    if (norm > bound) return;
    double phase = 0.0;
    for (std::size_t j = 0; j < n.size(); ++j)
      phase += static_cast<double>(n[j]) * to_double(j < lat.twist.size() ? lat.twist[j] : Rational(0));
    total += std::polar(std::pow(norm, -s), 2 * kPi * phase);
  });
  return total;
}

// Number of representations of n as a sum of `dim` squares, for n ≤ limit.
std::vector<double> squares_counts(int dim, int limit) {
  std::vector<double> r(limit + 1, 0.0);
  r[0] = 1.0;
  for (int d = 0; d < dim; ++d) {
    std::vector<double> next(limit + 1, 0.0);
    for (int n = 0; n <= limit; ++n) {
      if (r[n] == 0.0) continue;
      for (int m = -static_cast<int>(std::sqrt(limit)); m <= static_cast<int>(std::sqrt(limit)); ++m)
        if (n + m * m <= limit) next[n + m * m] += r[n];
    }
    r = std::move(next);
  }
  return r;
}

// Γ(a, x) for real a, via Γ(a, x) = (Γ(a+1, x) − x^a e^{−x})/a below zero.
double incomplete_gamma_oracle(double a, double x) {
  if (a > 0) return boost::math::tgamma(a, x);
  return (incomplete_gamma_oracle(a + 1, x) - std::pow(x, a) * std::exp(-x)) / a;
}

Matrix<double> random_gram(std::mt19937_64& rng, int rank) {
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::uniform_real_distribution<double> diag(0.7, 1.6);
  Matrix<double> b(rank, rank);
  for (int i = 0; i < rank; ++i)
    for (int j = 0; j < rank; ++j) b(i, j) = i == j ? diag(rng) : u(rng);
  return b.transpose() * b;
}

}  // namespace

TEST(Gamma, RealValuesAndReflection) {
  for (double x : {0.5, 1.0, 2.5, 5.0, 7.25, -0.5, -2.75}) {
    EXPECT_NEAR(complex_gamma(Complex(x, 0)).real(), std::tgamma(x), 1e-12 * std::abs(std::tgamma(x))) << x;
    EXPECT_NEAR(reciprocal_gamma(Complex(x, 0)).real(), 1.0 / std::tgamma(x), 1e-12) << x;
  }
  for (const Complex z : {Complex(0.3, 1.2), Complex(-1.7, 0.4), Complex(2.2, -3.0)}) {
    const Complex lhs = complex_gamma(z) * complex_gamma(1.0 - z);
    const Complex rhs = kPi / std::sin(kPi * z);
    EXPECT_NEAR(std::abs(lhs - rhs), 0.0, 1e-12 * std::abs(rhs));
    // Recurrence Γ(z+1) = zΓ(z).
    EXPECT_NEAR(std::abs(complex_gamma(z + 1.0) - z * complex_gamma(z)), 0.0, 1e-12 * std::abs(complex_gamma(z + 1.0)));
  }
  EXPECT_EQ(reciprocal_gamma(Complex(-2, 0)), Complex(0, 0));
  EXPECT_EQ(reciprocal_gamma(Complex(0, 0)), Complex(0, 0));
  EXPECT_THROW(complex_gamma(Complex(-2, 0)), PoleEncountered);
}

TEST(Gamma, UpperIncomplete) {
  for (double x : {0.1, 1.0, 3.5, 12.0}) {
    EXPECT_NEAR(upper_incomplete_gamma(Complex(1, 0), x).real(), std::exp(-x), 1e-13);
    EXPECT_NEAR(upper_incomplete_gamma(Complex(0.5, 0), x).real(), std::sqrt(kPi) * std::erfc(std::sqrt(x)), 1e-12);
    for (double a : {-1.5, 0.25, 2.0, 4.5}) {
      const double expected = incomplete_gamma_oracle(a, x);
      EXPECT_NEAR(upper_incomplete_gamma(Complex(a, 0), x).real(), expected, 1e-11 * std::max(1.0, std::abs(expected)))
          << a << " " << x;
      EXPECT_NEAR(upper_incomplete_gamma(Complex(a, 0), x).imag(), 0.0, 1e-13);
    }
  }
}

TEST(EpsteinZeta, RankOneIsTwiceRiemann) {
  const auto lat = make_lattice(gram_of({{1.0}}));
  for (double s : {2.0, 1.5, 0.75, 0.25, -0.5, -1.25}) {
    const double expected = 2 * boost::math::zeta(2 * s);
    EXPECT_NEAR(epstein_value(lat, Complex(s, 0)).real(), expected, 1e-11 * std::max(1.0, std::abs(expected))) << s;
  }
  EXPECT_NEAR(value_at_zero(lat), -1.0, 1e-12);
  EXPECT_THROW(epstein_value(lat, Complex(0.5, 0)), PoleEncountered);
}

TEST(EpsteinZeta, RankOneHalfTwistIsAlternating) {
  const auto lat = make_lattice(gram_of({{1.0}}), {half()});
  for (double s : {2.0, 1.0, 0.25, -0.5}) {
    const double expected = 2 * (std::pow(2.0, 1 - 2 * s) - 1) * boost::math::zeta(2 * s);
    EXPECT_NEAR(epstein_value(lat, Complex(s, 0)).real(), expected, 1e-11) << s;
  }
  // No pole at s = ½: the alternating sum is −2 log 2.
  EXPECT_NEAR(epstein_value(lat, Complex(0.5, 0)).real(), -2 * std::log(2.0), 1e-11);
  EXPECT_NEAR(value_at_zero(lat), -1.0, 1e-12);
}

TEST(EpsteinZeta, SquareLatticeIsZetaTimesCatalan) {
  const auto lat = make_lattice(gram_of({{1, 0}, {0, 1}}));
  const double expected = 4 * boost::math::zeta(2.0) * boost::math::constants::catalan<double>();
  EXPECT_NEAR(epstein_value(lat, Complex(2, 0)).real(), expected, 1e-12 * expected);
  EXPECT_NEAR(value_at_zero(lat), -1.0, 1e-12);
  EXPECT_THROW(epstein_value(lat, Complex(1, 0)), PoleEncountered);
}

TEST(EpsteinZeta, RankSevenAgainstSumsOfSquares) {
  const int limit = 400;
  const auto r7 = squares_counts(7, limit);
  double direct = 0.0;
  for (int n = 1; n <= limit; ++n) direct += r7[n] * std::pow(n, -7.0);
  auto id = Matrix<double>::identity(kDim);
  const auto lat = make_lattice(id);
  EXPECT_NEAR(epstein_value(lat, Complex(7, 0)).real(), direct, 1e-8 * direct);
  EXPECT_NEAR(value_at_zero(lat), -1.0, 1e-10);
  EXPECT_THROW(epstein_value(lat, Complex(3.5, 0)), PoleEncountered);
}

TEST(EpsteinZeta, RandomLatticesAgainstDirectSums) {
  std::mt19937_64 rng(2024);
  const std::vector<Rational> twists = {Rational(0), half(), Rational(1, 3), Rational(3, 4)};
  for (int trial = 0; trial < 20; ++trial) {
    const int rank = 1 + trial % 3;
    const auto gram = random_gram(rng, rank);
    std::vector<Rational> twist;
    for (int j = 0; j < rank; ++j) twist.push_back(twists[(rng() >> 7) % twists.size()]);
    const auto lat = make_lattice(gram, twist);
    const double s = rank / 2.0 + 2.5;
    const double bound = rank == 3 ? 1500.0 : 20000.0;
    const Complex expected = direct_sum(lat, s, bound);
    const Complex got = epstein_value(lat, Complex(s, 0));
    EXPECT_NEAR(std::abs(got - expected), 0.0, 1e-7 * std::abs(expected)) << "trial " << trial << " rank " << rank;
  }
}

TEST(EpsteinZeta, BasisChangeInvariance) {
  std::mt19937_64 rng(7);
  const auto gram = random_gram(rng, 3);
  const std::vector<Rational> twist = {half(), Rational(0), Rational(1, 3)};
  // U unimodular; n = U m maps the lattice onto itself with Q'[m] = Q[Um] and
  // twist' = Uᵀ twist.
  const auto u = gram_of({{1, 2, 0}, {0, 1, -1}, {1, 2, 1}});
  const auto gram2 = u.transpose() * gram * u;
  std::vector<Rational> twist2(3, Rational(0));
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) twist2[j] += Rational(static_cast<long>(u(i, j))) * twist[i];
  const auto a = make_lattice(gram, twist);
  const auto b = make_lattice(gram2, twist2);
  for (const Complex s : {Complex(3, 0), Complex(0.8, 0), Complex(-0.6, 0.4), Complex(0, 0)}) {
    const auto za = epstein_value(a, s), zb = epstein_value(b, s);
    EXPECT_NEAR(std::abs(za - zb), 0.0, 1e-10 * std::max(1.0, std::abs(za))) << s;
  }
}

TEST(EpsteinZeta, ScalingCovariance) {
  std::mt19937_64 rng(8);
  const auto gram = random_gram(rng, 2);
  const double c = 2.7;
  const auto a = make_lattice(gram);
  const auto b = make_lattice(c * gram);
  for (const Complex s : {Complex(2.5, 0), Complex(0.3, 0), Complex(-1.2, 0.5)}) {
    const auto expected = std::pow(c, -s) * epstein_value(a, s);
    EXPECT_NEAR(std::abs(epstein_value(b, s) - expected), 0.0, 1e-10 * std::max(1.0, std::abs(expected))) << s;
  }
}

TEST(EpsteinZeta, ValueAtZeroIsMinusOneForAnyTwist) {
  std::mt19937_64 rng(9);
  for (int rank = 1; rank <= 7; ++rank) {
    const auto gram = random_gram(rng, rank);
    EXPECT_NEAR(value_at_zero(make_lattice(gram)), -1.0, 1e-9) << rank;
    std::vector<Rational> twist(rank, Rational(0));
    twist[rank - 1] = half();
    EXPECT_NEAR(value_at_zero(make_lattice(gram, twist)), -1.0, 1e-9) << rank;
  }
}

TEST(EpsteinZeta, RejectsBadLattices) {
  EXPECT_THROW(make_lattice(gram_of({{1, 2}, {2, 1}})), MetricError);
  EXPECT_THROW(make_lattice(gram_of({{1, 0.5}, {0, 1}})), MetricError);
  EXPECT_THROW(make_lattice(gram_of({{1, 0}, {0, 1}}), {half()}), InputError);
}

TEST(FixedLattice, Examples) {
  const auto g = Metric7<Rational>::euclidean();
  const auto a = fixed_lattice(alpha(), g);
  ASSERT_EQ(a.rank(), 3u);
  EXPECT_TRUE(a.untwisted());
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t i = 0; i < kDim; ++i) EXPECT_EQ(a.basis(i, j), i == j ? 1 : 0);

  const auto b = fixed_lattice(beta(), g);
  ASSERT_EQ(b.rank(), 3u);
  EXPECT_TRUE(b.untwisted());
  const std::size_t axes[] = {0, 3, 4};
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t i = 0; i < kDim; ++i) EXPECT_EQ(b.basis(i, j), i == axes[j] ? 1 : 0);

  // αβ fixes axes 1, 6, 7 and shifts along 7 by ½.
  const auto ab = fixed_lattice(compose(alpha(), beta()), g);
  ASSERT_EQ(ab.rank(), 3u);
  EXPECT_FALSE(ab.untwisted());

  const auto id = fixed_lattice(AffineElement(), g);
  EXPECT_EQ(id.rank(), 7u);
  // Two order-three rotations and a 3×3 block with characteristic polynomial
  // x³ − x − 1: nothing but 0 is fixed.
  Matrix<Rational> m(kDim, kDim);
  for (int b : {0, 2}) {
    m(b, b + 1) = -1;
    m(b + 1, b) = 1;
    m(b + 1, b + 1) = -1;
  }
  m(4, 6) = 1;
  m(5, 4) = 1;
  m(5, 6) = 1;
  m(6, 5) = 1;
  EXPECT_THROW(fixed_lattice(AffineElement(m, zero_translation()), g), InputError);
}

TEST(FixedLattice, GramUsesInverseMetric) {
  auto f = diagonal({2, 1, 1, 1, 1, 1, 1});
  const auto g = metric_from_frame(f);
  const auto a = fixed_lattice(alpha(), g);
  EXPECT_DOUBLE_EQ(a.gram(0, 0), 0.25);
  EXPECT_DOUBLE_EQ(a.gram(1, 1), 1.0);
}

TEST(ClosedFormMu, MatchesExactInvariants) {
  for (const auto& ex : examples()) {
    const auto o = example_orbifold(ex.generators);
    const auto numeric = closed_form_mu(o);
    const auto exact = mu_invariants(o);
    EXPECT_NEAR(numeric.mu3, to_double(exact.mu3), 1e-9) << ex.name;
    EXPECT_NEAR(numeric.mu4, to_double(exact.mu4), 1e-9) << ex.name;
    EXPECT_NEAR(numeric.mu3, to_double(ex.mu3), 1e-9) << ex.name;
    EXPECT_NEAR(numeric.mu4, to_double(ex.mu4), 1e-9) << ex.name;
    ASSERT_EQ(numeric.terms.size(), o.group.order());
    for (const auto& t : numeric.terms) EXPECT_NEAR(t.value_at_zero, -1.0, 1e-9) << ex.name;
  }
}

TEST(ClosedFormMu, TwistedTermsInLargestExample) {
  const auto numeric = closed_form_mu(example_orbifold({alpha(), beta(), gamma()}));
  std::size_t twisted = 0;
  for (const auto& t : numeric.terms) twisted += t.twisted;
  EXPECT_EQ(twisted, 4u);
  EXPECT_EQ(numeric.terms.at(0).rank, 7u);
  for (std::size_t i = 1; i < numeric.terms.size(); ++i) EXPECT_EQ(numeric.terms[i].rank, 3u);
}

TEST(ShortVectors, Counts) {
  const auto id = rows_of(Matrix<double>::identity(kDim));
  EXPECT_EQ(short_vectors(id, 1.0).size(), 14u);
  EXPECT_EQ(short_vectors(id, 2.0).size(), 98u);
  const auto r7 = squares_counts(7, 9);
  double expected = 0.0;
  for (int n = 1; n <= 9; ++n) expected += r7[n];
  EXPECT_EQ(static_cast<double>(short_vectors(id, 9.0).size()), expected);
  EXPECT_EQ(short_vectors({{1.0, 0.5}, {0.5, 1.0}}, 1.0).size(), 6u);
  EXPECT_TRUE(short_vectors(id, 0.5).empty());
}
