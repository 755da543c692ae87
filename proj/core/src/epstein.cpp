#include "g2mu/epstein.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "g2mu/intlinalg.hpp"
#include "g2mu/invariants.hpp"
#include "g2mu/lattice.hpp"

namespace g2mu {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;
constexpr double kEulerGamma = 0.577215664901532860606512090082;

// Lanczos coefficients, g = 7, n = 9.
constexpr std::array<double, 9> kLanczos = {0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                                            771.32342877765313,   -176.61502916214059,   12.507343278686905,
                                            -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

Complex lanczos_gamma(Complex z) {
  z -= 1.0;
  Complex x = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) x += kLanczos[i] / (z + static_cast<double>(i));
  const Complex t = z + 7.5;
  return std::sqrt(2.0 * kPi) * std::pow(t, z + 0.5) * std::exp(-t) * x;
}

bool near_nonpositive_integer(Complex z, double tol, int* n = nullptr) {
  if (std::abs(z.imag()) > tol || z.real() > tol) return false;
  const double r = std::round(z.real());
  if (std::abs(z.real() - r) > tol) return false;
  if (n) *n = static_cast<int>(-r);
  return true;
}

/// E₁(x) = Γ(0, x) by its power series, for 0 < x < 1.
double exponential_integral_series(double x) {
  double sum = 0.0;
  double term = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= -x / k;
    const double add = term / k;
    sum += add;
    if (std::abs(add) < 1e-18 * std::abs(sum)) break;
  }
  return -kEulerGamma - std::log(x) - sum;
}

Complex incomplete_gamma_fraction(Complex a, double x) {
  // Γ(a, x) = e^{−x} x^a / f with f = b₀ + a₁/(b₁ + a₂/(b₂ + ...)),
  // b_i = x + 1 − a + 2i, a_i = −i(i − a); modified Lentz.
  constexpr double tiny = 1e-300;
  Complex f = x + 1.0 - a;
  if (std::abs(f) < tiny) f = tiny;
  Complex c = f;
  Complex d = 0.0;
  for (int i = 1; i < 100000; ++i) {
    const Complex an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    const Complex bn = x + 1.0 - a + 2.0 * static_cast<double>(i);
    d = bn + an * d;
    if (std::abs(d) < tiny) d = tiny;
    c = bn + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const Complex delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) return std::exp(-x + a * std::log(x)) / f;
  }
  throw std::runtime_error("incomplete gamma continued fraction did not converge");
}

/// γ(a, x) by its series, for small x.
Complex lower_incomplete_gamma_series(Complex a, double x) {
  Complex term = 1.0 / a;
  Complex sum = term;
  for (int k = 1; k < 1000; ++k) {
    term *= x / (a + static_cast<double>(k));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return std::exp(-x + a * std::log(x)) * sum;
}

std::vector<std::vector<double>> rows_of(const Matrix<double>& m) {
  std::vector<std::vector<double>> out(m.rows(), std::vector<double>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
  return out;
}

double quadratic(const Matrix<double>& q, const std::vector<double>& v) {
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) acc += v[i] * q(i, j) * v[j];
  return acc;
}

}  // namespace

Complex complex_gamma(Complex z) {
  if (near_nonpositive_integer(z, 0.0)) throw PoleEncountered("Γ has a pole at " + std::to_string(z.real()));
  if (z.real() < 0.5) return kPi / (std::sin(kPi * z) * lanczos_gamma(1.0 - z));
  return lanczos_gamma(z);
}

Complex reciprocal_gamma(Complex z) {
  if (near_nonpositive_integer(z, 0.0)) return 0.0;
  if (z.real() < 0.5) return std::sin(kPi * z) * lanczos_gamma(1.0 - z) / kPi;
  return 1.0 / lanczos_gamma(z);
}

Complex upper_incomplete_gamma(Complex a, double x) {
  if (!(x > 0.0)) throw std::domain_error("upper incomplete gamma needs x > 0");
  if (x >= 1.0) return incomplete_gamma_fraction(a, x);
  int n = 0;
  if (near_nonpositive_integer(a, 1e-13, &n)) {
    // Γ(−n, x) from Γ(0, x) = E₁(x) by Γ(b, x) = (Γ(b+1, x) − x^b e^{−x}) / b.
    double g = exponential_integral_series(x);
    for (int b = -1; b >= -n; --b) g = (g - std::pow(x, b) * std::exp(-x)) / b;
    return g;
  }
  return complex_gamma(a) - lower_incomplete_gamma_series(a, x);
}

bool TwistedLattice::untwisted() const {
  for (const auto& q : twist)
    if (mod1(q) != 0) return false;
  return true;
}

TwistedLattice make_lattice(const Matrix<double>& gram, std::vector<Rational> twist) {
  const std::size_t r = gram.rows();
  if (r == 0 || gram.cols() != r) throw InputError("lattice Gram matrix must be square and nonempty");
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j)
      if (std::abs(gram(i, j) - gram(j, i)) > 1e-12 * std::max(1.0, std::abs(gram(i, j))))
        throw MetricError("lattice Gram matrix is not symmetric");
  for (std::size_t k = 1; k <= r; ++k) {
    Matrix<double> lead(k, k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) lead(i, j) = gram(i, j);
    if (!(determinant(lead) > 0.0)) throw MetricError("lattice Gram matrix is not positive definite");
  }
  if (twist.empty()) twist.assign(r, Rational(0));
  if (twist.size() != r) throw InputError("twist length does not match the lattice rank");
  for (auto& q : twist) q = mod1(q);
  return TwistedLattice{Matrix<Rational>(), gram, std::move(twist)};
}

TwistedLattice fixed_lattice(const AffineElement& a, const Metric7<Rational>& g) {
  const Matrix<Rational> shifted = a.matrix().transpose() - Matrix<Rational>::identity(kDim);
  const Matrix<Rational> basis = integer_kernel(shifted);
  if (basis.cols() == 0) throw InputError("the fixed lattice of this element is trivial");
  const Matrix<Rational> gram = basis.transpose() * g.inverse_gram() * basis;
  std::vector<Rational> twist;
  for (std::size_t j = 0; j < basis.cols(); ++j) {
    Rational q(0);
    for (int i = 0; i < kDim; ++i) q += basis(i, j) * a.translation()[i];
    twist.push_back(q);
  }
  auto lattice = make_lattice(gram.cast<double>(), std::move(twist));
  lattice.basis = basis;
  return lattice;
}

Complex epstein_value(const TwistedLattice& lattice, Complex s) {
  const std::size_t r = lattice.rank();
  const double half_rank = static_cast<double>(r) / 2.0;
  const bool untwisted = lattice.untwisted();
  if (untwisted && std::abs(s - half_rank) < 1e-12)
    throw PoleEncountered("Epstein zeta of an untwisted rank " + std::to_string(r) + " lattice has a pole at s = " +
                          std::to_string(half_rank));

  // Normalize to determinant one: Z_{cQ}(s) = c^{−s} Z_Q(s).
  const double det = determinant(lattice.gram);
  const double c = std::pow(det, 1.0 / static_cast<double>(r));
  Matrix<double> q = lattice.gram;
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) q(i, j) /= c;
  const Matrix<double> q_dual = inverse(q);

  std::vector<double> twist(r);
  for (std::size_t i = 0; i < r; ++i) {
    double t = to_double(lattice.twist[i]);
    if (t > 0.5) t -= 1.0;
    twist[i] = t;
  }

  // Terms decay like e^{−πQ}; stop well below double precision.
  const double cutoff = (40.0 + 2.0 * std::abs(s) + static_cast<double>(r)) / kPi;

  Complex direct = 0.0;
  for_each_short_vector(rows_of(q), cutoff, [&](const IntVector& n, double) {
    std::vector<double> v(n.begin(), n.end());
    const double a = quadratic(q, v);
    Rational exponent(0);
    for (std::size_t i = 0; i < r; ++i) exponent += Rational(static_cast<long>(n[i])) * lattice.twist[i];
    const Complex phase = std::polar(1.0, 2.0 * kPi * to_double(mod1(exponent)));
    direct += phase * std::pow(kPi * a, -s) * upper_incomplete_gamma(s, kPi * a);
  });

  // Dual sum over m − q, enumerated inside a ball that contains every shifted point.
  const double shift = std::sqrt(quadratic(q_dual, twist));
  const double reach = std::sqrt(cutoff) + shift;
  Complex dual = 0.0;
  auto dual_term = [&](const std::vector<double>& m) {
    std::vector<double> v(r);
    for (std::size_t i = 0; i < r; ++i) v[i] = m[i] - twist[i];
    const double b = quadratic(q_dual, v);
    if (b > cutoff || b <= 0.0) return;
    dual += std::pow(kPi * b, s - half_rank) * upper_incomplete_gamma(half_rank - s, kPi * b);
  };
  dual_term(std::vector<double>(r, 0.0));
  for_each_short_vector(rows_of(q_dual), reach * reach,
                        [&](const IntVector& m, double) { dual_term(std::vector<double>(m.begin(), m.end())); });
  if (untwisted) dual += 1.0 / (s - half_rank);

  // Γ(s)π^{−s}Z(s) = direct + dual − 1/s, with det Q = 1.
  const Complex factor = std::pow(Complex(kPi), s) * reciprocal_gamma(s);
  const Complex boundary = std::pow(Complex(kPi), s) * reciprocal_gamma(s + 1.0);
  const Complex z = factor * (direct + dual) - boundary;
  return std::pow(Complex(c), -s) * z;
}

double value_at_zero(const TwistedLattice& lattice) { return epstein_value(lattice, 0.0).real(); }

NumericInvariants closed_form_mu(const JoyceOrbifold& o) {
  NumericInvariants out;
  const auto& g = o.structure.metric();
  double sum3 = 0.0;
  double sum4 = 0.0;
  for (std::size_t i = 0; i < o.group.order(); ++i) {
    const auto& a = o.group[i];
    const auto lattice = fixed_lattice(a, g);
    ZetaTerm t;
    t.element = i;
    t.rank = lattice.rank();
    t.twisted = !lattice.untwisted();
    t.value_at_zero = value_at_zero(lattice);
    t.tr8 = tr8_su3(a.matrix());
    t.tr12 = tr12_su3(a.matrix());
    sum3 += to_double(t.tr8) * t.value_at_zero;
    sum4 += to_double(t.tr12) * t.value_at_zero;
    out.terms.push_back(std::move(t));
  }
  const double order = static_cast<double>(o.group.order());
  out.mu3 = sum3 / order;
  out.mu4 = sum4 / order;
  return out;
}

}  // namespace g2mu
