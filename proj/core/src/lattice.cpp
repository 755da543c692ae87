#include "g2mu/lattice.hpp"

#include <cmath>
#include <stdexcept>

namespace g2mu {

namespace {

struct Enumerator {
  std::size_t n;
  std::vector<double> diag;                // q_ii
  std::vector<std::vector<double>> upper;  // q_ij, j > i
  double bound;
  const std::function<void(const IntVector&, double)>& visit;
  IntVector x;

  // Level i has partial sums over j > i already fixed in x.
  void recurse(std::size_t i, double remaining) {
    double center = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) center -= upper[i][j] * static_cast<double>(x[j]);
    const double radius = std::sqrt(std::max(0.0, remaining / diag[i]));
    const auto lo = static_cast<std::int64_t>(std::ceil(center - radius - 1e-12));
    const auto hi = static_cast<std::int64_t>(std::floor(center + radius + 1e-12));
    for (std::int64_t v = lo; v <= hi; ++v) {
      const double t = static_cast<double>(v) - center;
      const double left = remaining - diag[i] * t * t;
      if (left < -1e-12 * bound) continue;
      x[i] = v;
      if (i == 0) {
        bool zero = true;
        for (auto c : x) zero = zero && c == 0;
        if (!zero) visit(x, bound - left);
      } else {
        recurse(i - 1, left);
      }
    }
    x[i] = 0;
  }
};

}  // namespace

void for_each_short_vector(const std::vector<std::vector<double>>& q, double bound,
                           const std::function<void(const IntVector&, double)>& visit) {
  const std::size_t n = q.size();
  if (n == 0 || bound <= 0.0) return;
  for (const auto& row : q)
    if (row.size() != n) throw std::invalid_argument("quadratic form must be square");

  // Q = Σ_i q_ii (x_i + Σ_{j>i} q_ij x_j)², computed by an LDLᵀ-style sweep.
  std::vector<std::vector<double>> a = q;
  std::vector<double> diag(n);
  std::vector<std::vector<double>> upper(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i][i] <= 0.0) throw std::domain_error("quadratic form is not positive definite");
    diag[i] = a[i][i];
    for (std::size_t j = i + 1; j < n; ++j) upper[i][j] = a[i][j] / a[i][i];
    for (std::size_t k = i + 1; k < n; ++k)
      for (std::size_t l = k; l < n; ++l) {
        a[k][l] -= upper[i][k] * upper[i][l] * diag[i];
        a[l][k] = a[k][l];
      }
  }
  const double enlarged = bound * (1.0 + 1e-9);
  Enumerator e{n, diag, upper, enlarged, visit, IntVector(n, 0)};
  e.recurse(n - 1, enlarged);
}

std::vector<IntVector> short_vectors(const std::vector<std::vector<double>>& q, double bound) {
  std::vector<IntVector> out;
  for_each_short_vector(q, bound, [&](const IntVector& x, double) { out.push_back(x); });
  return out;
}

}  // namespace g2mu
