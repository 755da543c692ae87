#pragma once

#include <cstddef>
#include <vector>

#include "g2mu/matrix.hpp"
#include "g2mu/rational.hpp"

namespace g2mu {

__extension__ typedef __int128 Int128;

/// Kernel of an integer matrix in the form produced by fraction-free
/// Gauss-Jordan elimination: vectors[k] is integral, equals `scale` at
/// free_columns[k] and 0 at the other free columns. Dividing by `scale` gives
/// the basis returned by nullspace().
struct ScaledKernel {
  Int128 scale = 1;
  std::vector<std::size_t> free_columns;
  std::vector<std::vector<Int128>> vectors;
};

/// Fraction-free (Bareiss) elimination in 128-bit integers; falls back to GMP
/// integers if an intermediate overflows. Throws std::overflow_error only if
/// the final result itself does not fit.
ScaledKernel scaled_kernel(const std::vector<std::vector<Int128>>& rows, std::size_t cols);

/// Z-basis of {x ∈ ℤⁿ : M x = 0} for an integer matrix M, via unimodular
/// column operations (column Hermite form). Returned as columns.
Matrix<Rational> integer_kernel(const Matrix<Rational>& m);

/// Row-wise scaling of a rational matrix to integers (each row multiplied by
/// the lcm of its denominators). Throws std::overflow_error if an entry does
/// not fit in 128 bits.
std::vector<std::vector<Int128>> integral_rows(const Matrix<Rational>& m);

Rational to_rational(Int128 x);
long double to_long_double(Int128 x);

}  // namespace g2mu
