#pragma once

#include <array>
#include <map>
#include <vector>

#include "g2mu/exterior.hpp"

namespace g2mu {

/// Irreducible G2 component of Λ^grade, named by its dimension.
struct TypeLabel {
  int grade = 0;
  int component = 1;

  friend bool operator==(const TypeLabel&, const TypeLabel&) = default;
  friend auto operator<=>(const TypeLabel&, const TypeLabel&) = default;
};

/// Components present in Λ^grade: {1}, {7}, {7,14}, {1,7,27}, {1,7,27}, {7,14}, {7}, {1}.
const std::vector<int>& type_components(int grade);
bool is_valid_label(const TypeLabel& label);
std::string to_string(const TypeLabel& label);

/// φ₀ = θ¹²³ + θ¹⁴⁵ + θ¹⁶⁷ + θ²⁴⁶ − θ²⁵⁷ − θ³⁴⁷ − θ³⁵⁶.
ExteriorForm<Rational> standard_phi0();

/// The constant G2 structure φ = F*φ₀ on ℝ⁷ with its metric FᵀF and ψ = ⋆φ.
/// Projection matrices for every grade are built once at construction.
template <class S>
class G2Structure {
 public:
  explicit G2Structure(const Matrix<S>& frame);
  static G2Structure standard() { return G2Structure(Matrix<S>::identity(kDim)); }

  const Matrix<S>& frame() const { return frame_; }
  const Metric7<S>& metric() const { return metric_; }
  const ExteriorForm<S>& phi() const { return phi_; }
  const ExteriorForm<S>& psi() const { return psi_; }
  ExteriorForm<S> volume() const { return ExteriorForm<S>::basis_form(MultiIndex::from_mask(0x7f), metric_.vol()); }

  /// Columns span the component (not orthonormal; exact when S is).
  const Matrix<S>& spanning_set(TypeLabel label) const;
  /// Orthogonal projector onto the component, acting on coefficient vectors.
  const Matrix<S>& projection(TypeLabel label) const;

  template <class T>
  ExteriorForm<T> project(TypeLabel label, const ExteriorForm<T>& a) const {
    if (!is_valid_label(label)) throw GradeError("invalid type label " + to_string(label));
    if (a.grade() != label.grade) throw GradeError("grade mismatch in projection onto " + to_string(label));
    return ExteriorForm<T>(a.grade(), g2mu::apply(projection(label), a.coeffs()));
  }

  /// Coefficient-space matrices of I = 4/3π₁ + π₇ − π₂₇ (grade 3) and
  /// J = 3/4π₁ + π₇ − π₂₇ (grade 4).
  const Matrix<S>& I_matrix() const { return i_matrix_; }
  const Matrix<S>& J_matrix() const { return j_matrix_; }

  template <class T>
  ExteriorForm<T> apply_I(const ExteriorForm<T>& a) const {
    if (a.grade() != 3) throw GradeError("I acts on 3-forms");
    return ExteriorForm<T>(3, g2mu::apply(i_matrix_, a.coeffs()));
  }
  template <class T>
  ExteriorForm<T> apply_J(const ExteriorForm<T>& a) const {
    if (a.grade() != 4) throw GradeError("J acts on 4-forms");
    return ExteriorForm<T>(4, g2mu::apply(j_matrix_, a.coeffs()));
  }

  /// Hodge star Λ^p → Λ^{7-p} and the inverse of the Λ^p Gram matrix, cached.
  const Matrix<S>& star(int grade) const { return star_.at(grade); }
  const Matrix<S>& inverse_induced(int grade) const { return inverse_induced_.at(grade); }

  /// A*φ = φ, i.e. F A F⁻¹ ∈ G2.
  bool is_g2_element(const Matrix<S>& a) const;

 private:
  Matrix<S> frame_;
  Metric7<S> metric_;
  ExteriorForm<S> phi_;
  ExteriorForm<S> psi_;
  std::map<TypeLabel, Matrix<S>> span_;
  std::map<TypeLabel, Matrix<S>> proj_;
  std::array<Matrix<S>, kDim + 1> star_;
  std::array<Matrix<S>, kDim + 1> inverse_induced_;
  Matrix<S> i_matrix_;
  Matrix<S> j_matrix_;
};

/// Basis of the component, orthonormal for the structure's metric (floating).
template <class S>
std::vector<ExteriorForm<double>> type_basis(const G2Structure<S>& s, TypeLabel label);

/// Floating copy of an exact structure.
G2Structure<double> to_floating(const G2Structure<Rational>& s);

}  // namespace g2mu
