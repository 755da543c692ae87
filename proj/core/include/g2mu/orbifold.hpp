#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "g2mu/g2_structure.hpp"

namespace g2mu {

/// x ↦ Ax + t on T⁷ with A ∈ SL(7,ℤ) and t reduced into [0,1)⁷.
class AffineElement {
 public:
  AffineElement();
  /// Throws InputError for non-integer entries, NonUnimodular if det A ≠ 1.
  AffineElement(Matrix<Rational> matrix, Vec7<Rational> translation);

  static AffineElement identity() { return AffineElement(); }

  const Matrix<Rational>& matrix() const { return matrix_; }
  const Vec7<Rational>& translation() const { return translation_; }
  bool is_identity() const;
  /// Canonical text form used for ordering and deduplication.
  std::string key() const;

  friend bool operator==(const AffineElement& a, const AffineElement& b) {
    return a.matrix_ == b.matrix_ && a.translation_ == b.translation_;
  }

 private:
  Matrix<Rational> matrix_;
  Vec7<Rational> translation_;
};

/// compose(a, b) acts as a∘b: (A₁A₂, A₁t₂ + t₁ mod 1).
AffineElement compose(const AffineElement& a, const AffineElement& b);
AffineElement inverse(const AffineElement& a);

/// Convenience for the common case of diagonal ±1 matrices.
AffineElement diagonal_element(const std::array<int, kDim>& signs, const Vec7<Rational>& translation = {});

inline constexpr std::size_t kDefaultGroupCap = 10000;

class OrbifoldGroup {
 public:
  const std::vector<AffineElement>& elements() const { return elements_; }
  std::size_t order() const { return elements_.size(); }
  const AffineElement& operator[](std::size_t i) const { return elements_.at(i); }

 private:
  friend OrbifoldGroup generate(const std::vector<AffineElement>&, std::size_t);
  std::vector<AffineElement> elements_;
};

/// Closure of the generators under composition; the identity comes first and
/// the remaining elements are in breadth-first discovery order. Throws
/// NonFinite when more than `cap` elements are produced.
OrbifoldGroup generate(const std::vector<AffineElement>& generators, std::size_t cap = kDefaultGroupCap);

struct JoyceOrbifold {
  OrbifoldGroup group;
  G2Structure<Rational> structure;
};

/// Checks F A F⁻¹ ∈ G2 for every element; throws NotG2Compatible naming the
/// first element that fails.
JoyceOrbifold validate_joyce(const OrbifoldGroup& group, const Matrix<Rational>& frame);

}  // namespace g2mu
