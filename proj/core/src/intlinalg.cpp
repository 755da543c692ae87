#include "g2mu/intlinalg.hpp"

#include <stdexcept>

#include "g2mu/errors.hpp"

namespace g2mu {

namespace {

__extension__ typedef unsigned __int128 UInt128;

struct Checked128 {
  static Int128 mul(Int128 a, Int128 b, bool& overflow) {
    Int128 r;
    if (__builtin_mul_overflow(a, b, &r)) overflow = true;
    return r;
  }
  static Int128 sub(Int128 a, Int128 b, bool& overflow) {
    Int128 r;
    if (__builtin_sub_overflow(a, b, &r)) overflow = true;
    return r;
  }
};

struct CheckedBig {
  static Integer mul(const Integer& a, const Integer& b, bool&) { return a * b; }
  static Integer sub(const Integer& a, const Integer& b, bool&) { return a - b; }
};

template <class T, class Ops>
bool bareiss(std::vector<std::vector<T>>& a, std::size_t cols, T& scale, std::vector<std::size_t>& pivots) {
  bool overflow = false;
  T prev = 1;
  std::size_t row = 0;
  for (std::size_t c = 0; c < cols && row < a.size(); ++c) {
    std::size_t p = row;
    while (p < a.size() && a[p][c] == 0) ++p;
    if (p == a.size()) continue;
    std::swap(a[p], a[row]);
    const T piv = a[row][c];
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (i == row) continue;
      const T f = a[i][c];
      for (std::size_t j = 0; j < cols; ++j) {
        const T x = Ops::sub(Ops::mul(piv, a[i][j], overflow), Ops::mul(f, a[row][j], overflow), overflow);
        if (overflow) return false;
        a[i][j] = x / prev;
      }
    }
    prev = piv;
    pivots.push_back(c);
    ++row;
  }
  scale = prev;
  return true;
}

template <class T>
void assemble(const std::vector<std::vector<T>>& a, std::size_t cols, T scale,
              const std::vector<std::size_t>& pivots, std::vector<std::size_t>& free,
              std::vector<std::vector<T>>& vectors) {
  std::vector<bool> is_pivot(cols, false);
  for (auto p : pivots) is_pivot[p] = true;
  for (std::size_t c = 0; c < cols; ++c)
    if (!is_pivot[c]) free.push_back(c);
  // Keep the scale positive so that free coordinates carry a positive weight.
  const T sign = scale < 0 ? T(-1) : T(1);
  for (auto f : free) {
    std::vector<T> v(cols, T(0));
    v[f] = scale * sign;
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -a[r][f] * sign;
    vectors.push_back(std::move(v));
  }
}

Int128 narrow(const Integer& x) {
  static const Integer lo = -(Integer(1) << 126);
  static const Integer hi = Integer(1) << 126;
  if (x < lo || x > hi) throw std::overflow_error("integer kernel entry exceeds 128 bits");
  const bool neg = x < 0;
  Integer m = neg ? Integer(-x) : x;
  const auto lo_bits = static_cast<unsigned long long>(m & Integer(~0ull));
  const auto hi_bits = static_cast<unsigned long long>(m >> 64);
  Int128 r = (static_cast<Int128>(hi_bits) << 64) | static_cast<Int128>(lo_bits);
  return neg ? -r : r;
}

Integer widen(Int128 x) {
  const bool neg = x < 0;
  UInt128 m = neg ? static_cast<UInt128>(-(x + 1)) + 1u : static_cast<UInt128>(x);
  Integer r = Integer(static_cast<unsigned long long>(m >> 64));
  r <<= 64;
  r += Integer(static_cast<unsigned long long>(m & ~0ull));
  return neg ? Integer(-r) : r;
}

}  // namespace

ScaledKernel scaled_kernel(const std::vector<std::vector<Int128>>& rows, std::size_t cols) {
  ScaledKernel out;
  {
    auto a = rows;
    Int128 scale = 1;
    std::vector<std::size_t> pivots;
    if (bareiss<Int128, Checked128>(a, cols, scale, pivots)) {
      assemble(a, cols, scale, pivots, out.free_columns, out.vectors);
      out.scale = scale < 0 ? -scale : scale;
      return out;
    }
  }
  std::vector<std::vector<Integer>> a(rows.size(), std::vector<Integer>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) a[i][j] = widen(rows[i][j]);
  Integer scale = 1;
  std::vector<std::size_t> pivots;
  bareiss<Integer, CheckedBig>(a, cols, scale, pivots);
  std::vector<std::vector<Integer>> vectors;
  assemble(a, cols, scale, pivots, out.free_columns, vectors);
  // Only the ratios matter; the determinant scale usually shares a large
  // factor with every entry.
  Integer g = scale < 0 ? Integer(-scale) : scale;
  for (const auto& v : vectors)
    for (const auto& x : v)
      if (x != 0) g = boost::multiprecision::gcd(g, x);
  if (g > 1) {
    scale /= g;
    for (auto& v : vectors)
      for (auto& x : v) x /= g;
  }
  out.scale = narrow(scale < 0 ? Integer(-scale) : scale);
  for (const auto& v : vectors) {
    std::vector<Int128> w;
    for (const auto& x : v) w.push_back(narrow(x));
    out.vectors.push_back(std::move(w));
  }
  return out;
}

Matrix<Rational> integer_kernel(const Matrix<Rational>& m) {
  const std::size_t rows = m.rows(), cols = m.cols();
  std::vector<std::vector<Integer>> a(rows, std::vector<Integer>(cols));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      if (denominator(m(i, j)) != 1) throw InputError("integer_kernel needs an integer matrix");
      a[i][j] = numerator(m(i, j));
    }
  std::vector<std::vector<Integer>> u(cols, std::vector<Integer>(cols, Integer(0)));
  for (std::size_t j = 0; j < cols; ++j) u[j][j] = 1;

  auto combine = [&](std::size_t j, std::size_t k, const Integer& p, const Integer& q, const Integer& r,
                     const Integer& s) {
    // (col_j, col_k) ← (p col_j + q col_k, r col_j + s col_k), with ps − qr = ±1.
    for (std::size_t i = 0; i < rows; ++i) {
      const Integer x = a[i][j], y = a[i][k];
      a[i][j] = p * x + q * y;
      a[i][k] = r * x + s * y;
    }
    for (std::size_t i = 0; i < cols; ++i) {
      const Integer x = u[i][j], y = u[i][k];
      u[i][j] = p * x + q * y;
      u[i][k] = r * x + s * y;
    }
  };

  std::size_t lead = 0;  // columns [0, lead) hold pivots
  for (std::size_t i = 0; i < rows && lead < cols; ++i) {
    for (std::size_t k = lead + 1; k < cols; ++k) {
      if (a[i][k] == 0) continue;
      // Extended gcd of a[i][lead], a[i][k].
      Integer x = a[i][lead], y = a[i][k];
      Integer s0 = 1, t0 = 0, s1 = 0, t1 = 1;
      while (y != 0) {
        const Integer q = x / y;
        Integer tmp = x - q * y;
        x = y;
        y = tmp;
        tmp = s0 - q * s1;
        s0 = s1;
        s1 = tmp;
        tmp = t0 - q * t1;
        t0 = t1;
        t1 = tmp;
      }
      // s0·a + t0·b = x and s1·a + t1·b = 0 with s0 t1 − t0 s1 = ±1.
      combine(lead, k, s0, t0, s1, t1);
    }
    if (a[i][lead] != 0) ++lead;
  }
  // Hermite normal form of the kernel columns, so the basis is canonical.
  std::vector<std::vector<Integer>> c(u.begin(), u.end());  // c[i][k]: row i, column k
  const std::size_t first = lead, ncols = cols;
  std::size_t p = first;
  for (std::size_t i = 0; i < cols && p < ncols; ++i) {
    for (std::size_t k = p + 1; k < ncols; ++k) {
      while (c[i][k] != 0) {
        const Integer q = c[i][p] / c[i][k];
        for (std::size_t r = 0; r < cols; ++r) {
          c[r][p] -= q * c[r][k];
          std::swap(c[r][p], c[r][k]);
        }
      }
    }
    if (c[i][p] == 0) continue;
    if (c[i][p] < 0)
      for (std::size_t r = 0; r < cols; ++r) c[r][p] = -c[r][p];
    for (std::size_t j = first; j < p; ++j) {
      Integer q = c[i][j] / c[i][p];
      if (c[i][j] - q * c[i][p] < 0) q -= 1;
      if (q != 0)
        for (std::size_t r = 0; r < cols; ++r) c[r][j] -= q * c[r][p];
    }
    ++p;
  }
  Matrix<Rational> basis(cols, cols - lead);
  for (std::size_t k = lead; k < cols; ++k)
    for (std::size_t i = 0; i < cols; ++i) basis(i, k - lead) = Rational(c[i][k]);
  return basis;
}

std::vector<std::vector<Int128>> integral_rows(const Matrix<Rational>& m) {
  std::vector<std::vector<Int128>> out(m.rows(), std::vector<Int128>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Integer l = 1;
    for (std::size_t j = 0; j < m.cols(); ++j) l = lcm(l, Integer(denominator(m(i, j))));
    for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = narrow(Integer(numerator(m(i, j)) * (l / denominator(m(i, j)))));
  }
  return out;
}

Rational to_rational(Int128 x) { return Rational(widen(x)); }

long double to_long_double(Int128 x) { return static_cast<long double>(x); }

}  // namespace g2mu
