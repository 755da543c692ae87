#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "g2mu/errors.hpp"
#include "g2mu/matrix.hpp"
#include "g2mu/rational.hpp"

namespace g2mu {

inline constexpr int kDim = 7;

template <class S>
using Vec7 = std::array<S, kDim>;

/// Strictly increasing set of indices in 1..7, stored as a bitmask (bit i-1
/// set for index i).
class MultiIndex {
 public:
  MultiIndex() = default;
  static MultiIndex from_mask(std::uint8_t mask);
  /// Indices are 1-based and must be strictly increasing.
  static MultiIndex of(std::initializer_list<int> indices);
  /// Parses the compact "1234" notation used in reports.
  static MultiIndex parse(const std::string& digits);

  std::uint8_t mask() const { return mask_; }
  int grade() const;
  std::vector<int> indices() const;
  bool contains(int index) const { return (mask_ >> (index - 1)) & 1u; }
  MultiIndex complement() const { return from_mask(static_cast<std::uint8_t>(~mask_ & 0x7f)); }
  std::string str() const;

  friend bool operator==(MultiIndex a, MultiIndex b) { return a.mask_ == b.mask_; }

 private:
  explicit MultiIndex(std::uint8_t mask) : mask_(mask) {}
  std::uint8_t mask_ = 0;
};

/// C(7, grade).
std::size_t basis_size(int grade);
/// All multi-indices of a grade in lexicographic order.
const std::vector<MultiIndex>& basis(int grade);
/// Position of a multi-index within basis(grade).
std::size_t position(MultiIndex index);
/// Sign of θ^I ∧ θ^J relative to θ^{I∪J}; 0 if the sets overlap.
int wedge_sign(MultiIndex a, MultiIndex b);

/// Element of Λ^p(ℝ⁷)* as dense coefficients over lexicographic multi-indices.
template <class S>
class ExteriorForm {
 public:
  ExteriorForm() : ExteriorForm(0) {}
  explicit ExteriorForm(int grade);
  ExteriorForm(int grade, std::vector<S> coeffs);

  static ExteriorForm scalar(const S& value);
  static ExteriorForm basis_form(MultiIndex index, const S& coeff = S(1));
  static ExteriorForm covector(const Vec7<S>& components);

  int grade() const { return grade_; }
  std::size_t size() const { return coeffs_.size(); }
  const std::vector<S>& coeffs() const { return coeffs_; }
  std::vector<S>& coeffs() { return coeffs_; }
  const S& operator[](MultiIndex index) const;
  S& operator[](MultiIndex index);
  bool is_zero() const;
  std::size_t nonzero_count() const;
  double max_magnitude() const;

  template <class T>
  ExteriorForm<T> cast() const {
    std::vector<T> out(coeffs_.size());
    for (std::size_t i = 0; i < coeffs_.size(); ++i) out[i] = scalar_cast<T>(coeffs_[i]);
    return ExteriorForm<T>(grade_, std::move(out));
  }

  ExteriorForm& operator+=(const ExteriorForm& other);
  ExteriorForm& operator-=(const ExteriorForm& other);
  ExteriorForm& operator*=(const S& s);

  friend ExteriorForm operator+(ExteriorForm a, const ExteriorForm& b) { return a += b; }
  friend ExteriorForm operator-(ExteriorForm a, const ExteriorForm& b) { return a -= b; }
  friend ExteriorForm operator-(ExteriorForm a) { return a *= S(-1); }
  friend ExteriorForm operator*(const S& s, ExteriorForm a) { return a *= s; }
  friend bool operator==(const ExteriorForm& a, const ExteriorForm& b) {
    return a.grade_ == b.grade_ && a.coeffs_ == b.coeffs_;
  }

 private:
  int grade_;
  std::vector<S> coeffs_;
};

/// Riemannian metric on ℝ⁷: Gram matrix of the standard basis vectors together
/// with the volume factor √det(gram).
template <class S>
class Metric7 {
 public:
  /// Checks symmetry, positive leading minors and vol² = det(gram).
  Metric7(Matrix<S> gram, S vol);
  static Metric7 euclidean();

  const Matrix<S>& gram() const { return gram_; }
  const Matrix<S>& inverse_gram() const { return inverse_; }
  const S& vol() const { return vol_; }
  /// Gram matrix of the basis θ^I of Λ^p (minors of the inverse Gram matrix).
  const Matrix<S>& induced(int grade) const { return induced_.at(grade); }

  S pair(const Vec7<S>& u, const Vec7<S>& v) const;
  /// Covector g(v, ·).
  Vec7<S> flat(const Vec7<S>& v) const;

 private:
  Matrix<S> gram_;
  Matrix<S> inverse_;
  S vol_;
  std::array<Matrix<S>, kDim + 1> induced_;
};

/// Floating metric from a Gram matrix, vol = √det.
Metric7<double> metric_from_gram(const Matrix<double>& gram);

/// Metric induced by pulling back the Euclidean metric along F: gram = FᵀF,
/// vol = det F. Rejects det F ≤ 0.
template <class S>
Metric7<S> metric_from_frame(const Matrix<S>& frame);

template <class S>
ExteriorForm<S> wedge(const ExteriorForm<S>& a, const ExteriorForm<S>& b);

/// Contraction v ⌟ a with a vector v (components in the standard basis).
template <class S>
ExteriorForm<S> interior(const Vec7<S>& v, const ExteriorForm<S>& a);

/// ⟨a, b⟩_g (bilinear, no conjugation).
template <class S>
S inner(const ExteriorForm<S>& a, const ExteriorForm<S>& b, const Metric7<S>& g);

/// Hodge star fixed by a ∧ ⋆b = ⟨a,b⟩_g vol_g with vol_g = vol·θ^{1…7}.
template <class S>
ExteriorForm<S> hodge_star(const ExteriorForm<S>& a, const Metric7<S>& g);

/// Pullback (A*ω)(u₁,…,u_p) = ω(Au₁,…,Au_p).
template <class S>
ExteriorForm<S> pullback(const Matrix<S>& a, const ExteriorForm<S>& form);

// Matrices of the same maps on coefficient vectors, for composing operators.

/// a ↦ ω ∧ a from Λ^p to Λ^{p+|ω|}.
template <class S>
Matrix<S> wedge_matrix(const ExteriorForm<S>& omega, int grade);
/// a ↦ v ⌟ a from Λ^p to Λ^{p-1}.
template <class S>
Matrix<S> interior_matrix(const Vec7<S>& v, int grade);
template <class S>
Matrix<S> star_matrix(const Metric7<S>& g, int grade);
template <class S>
Matrix<S> pullback_matrix(const Matrix<S>& a, int grade);

/// Metric adjoint of a linear map Λ^p → Λ^q: H_p⁻¹ Mᵀ H_q.
template <class S>
Matrix<S> metric_adjoint(const Matrix<S>& map, int from_grade, int to_grade, const Metric7<S>& g);

template <class S>
ExteriorForm<S> apply(const Matrix<S>& map, const ExteriorForm<S>& a, int to_grade) {
  return ExteriorForm<S>(to_grade, g2mu::apply(map, a.coeffs()));
}

std::string to_string(const ExteriorForm<Rational>& form);

}  // namespace g2mu
