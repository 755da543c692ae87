#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace g2mu {

using IntVector = std::vector<std::int64_t>;

/// Calls visit(x, xᵀQx) for every nonzero x ∈ ℤⁿ with xᵀQx ≤ bound, by
/// Fincke-Pohst enumeration. Q must be symmetric positive definite. The bound
/// is enlarged by a relative 1e-9 so callers with exact norms should filter.
void for_each_short_vector(const std::vector<std::vector<double>>& q, double bound,
                           const std::function<void(const IntVector&, double)>& visit);

std::vector<IntVector> short_vectors(const std::vector<std::vector<double>>& q, double bound);

}  // namespace g2mu
