#include "g2mu/g2_structure.hpp"

#include <cmath>

namespace g2mu {

namespace {

template <class S>
Matrix<S> orthogonal_projector(const Matrix<S>& span, const Matrix<S>& h) {
  const Matrix<S> bt_h = span.transpose() * h;
  return span * inverse(bt_h * span) * bt_h;
}

template <class S>
Matrix<S> contraction_span(const ExteriorForm<S>& form) {
  std::vector<std::vector<S>> cols;
  for (int i = 0; i < kDim; ++i) {
    Vec7<S> e{};
    e.fill(S(0));
    e[i] = S(1);
    cols.push_back(interior(e, form).coeffs());
  }
  return Matrix<S>::from_columns(basis_size(form.grade() - 1), cols);
}

}  // namespace

const std::vector<int>& type_components(int grade) {
  static const std::array<std::vector<int>, kDim + 1> table = {
      std::vector<int>{1},        std::vector<int>{7},        std::vector<int>{7, 14}, std::vector<int>{1, 7, 27},
      std::vector<int>{1, 7, 27}, std::vector<int>{7, 14},    std::vector<int>{7},     std::vector<int>{1}};
  if (grade < 0 || grade > kDim) throw GradeError("grade " + std::to_string(grade) + " outside 0..7");
  return table[grade];
}

bool is_valid_label(const TypeLabel& label) {
  if (label.grade < 0 || label.grade > kDim) return false;
  const auto& c = type_components(label.grade);
  return std::find(c.begin(), c.end(), label.component) != c.end();
}

std::string to_string(const TypeLabel& label) {
  return "Λ^" + std::to_string(label.grade) + "_" + std::to_string(label.component);
}

ExteriorForm<Rational> standard_phi0() {
  ExteriorForm<Rational> phi(3);
  phi[MultiIndex::of({1, 2, 3})] = 1;
  phi[MultiIndex::of({1, 4, 5})] = 1;
  phi[MultiIndex::of({1, 6, 7})] = 1;
  phi[MultiIndex::of({2, 4, 6})] = 1;
  phi[MultiIndex::of({2, 5, 7})] = -1;
  phi[MultiIndex::of({3, 4, 7})] = -1;
  phi[MultiIndex::of({3, 5, 6})] = -1;
  return phi;
}

template <class S>
G2Structure<S>::G2Structure(const Matrix<S>& frame)
    : frame_(frame),
      metric_(metric_from_frame(frame)),
      phi_(pullback(frame, standard_phi0().cast<S>())),
      psi_(hodge_star(phi_, metric_)) {
  const auto check = wedge(phi_, psi_)[MultiIndex::from_mask(0x7f)] - S(7) * metric_.vol();
  if (!ScalarTraits<S>::is_zero(check, std::max(1.0, ScalarTraits<S>::magnitude(metric_.vol()))))
    throw std::logic_error("φ ∧ ψ ≠ 7 vol");

  for (int p = 0; p <= kDim; ++p) {
    star_[p] = star_matrix(metric_, p);
    inverse_induced_[p] = inverse(metric_.induced(p));
  }

  const auto& h = [this](int p) -> const Matrix<S>& { return metric_.induced(p); };

  span_[{2, 7}] = contraction_span(phi_);
  span_[{2, 14}] = nullspace(wedge_matrix(psi_, 2));
  Matrix<S> phi_col(basis_size(3), 1);
  for (std::size_t i = 0; i < phi_.size(); ++i) phi_col(i, 0) = phi_.coeffs()[i];
  span_[{3, 1}] = phi_col;
  span_[{3, 7}] = contraction_span(psi_);
  span_[{3, 27}] = nullspace(vstack(wedge_matrix(phi_, 3), wedge_matrix(psi_, 3)));

  for (const auto& [label, m] : span_) {
    if (static_cast<int>(m.cols()) != label.component)
      throw std::logic_error("component " + to_string(label) + " has dimension " + std::to_string(m.cols()));
    proj_[label] = orthogonal_projector(m, h(label.grade));
  }

  // ⋆ is an isometric isomorphism Λ^p_q → Λ^{7-p}_q, so grades 4 and 5 come from 3 and 2.
  for (int p : {2, 3}) {
    const auto& star_p = star_[p];
    const auto& star_q = star_[kDim - p];
    for (int c : type_components(p)) {
      span_[{kDim - p, c}] = star_p * span_.at({p, c});
      proj_[{kDim - p, c}] = star_p * proj_.at({p, c}) * star_q;
    }
  }
  for (int p : {0, 1, 6, 7}) {
    const int c = type_components(p).front();
    span_[{p, c}] = Matrix<S>::identity(basis_size(p));
    proj_[{p, c}] = Matrix<S>::identity(basis_size(p));
  }

  i_matrix_ = S(4) / S(3) * proj_.at({3, 1}) + proj_.at({3, 7}) - proj_.at({3, 27});
  j_matrix_ = S(3) / S(4) * proj_.at({4, 1}) + proj_.at({4, 7}) - proj_.at({4, 27});
}

template <class S>
const Matrix<S>& G2Structure<S>::spanning_set(TypeLabel label) const {
  if (!is_valid_label(label)) throw GradeError("invalid type label " + to_string(label));
  return span_.at(label);
}

template <class S>
const Matrix<S>& G2Structure<S>::projection(TypeLabel label) const {
  if (!is_valid_label(label)) throw GradeError("invalid type label " + to_string(label));
  return proj_.at(label);
}

template <class S>
bool G2Structure<S>::is_g2_element(const Matrix<S>& a) const {
  const auto moved = pullback(a, phi_);
  const double scale = std::max(1.0, phi_.max_magnitude());
  for (std::size_t i = 0; i < moved.size(); ++i)
    if (!ScalarTraits<S>::is_zero(moved.coeffs()[i] - phi_.coeffs()[i], scale)) return false;
  return true;
}

template <class S>
std::vector<ExteriorForm<double>> type_basis(const G2Structure<S>& s, TypeLabel label) {
  const Matrix<double> span = s.spanning_set(label).template cast<double>();
  const Matrix<double> h = s.metric().induced(label.grade).template cast<double>();
  std::vector<std::vector<double>> done;
  auto pair = [&](const std::vector<double>& a, const std::vector<double>& b) {
    const auto hb = g2mu::apply(h, b);
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * hb[i];
    return acc;
  };
  for (std::size_t j = 0; j < span.cols(); ++j) {
    auto v = span.column(j);
    // Two passes of modified Gram-Schmidt.
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : done) {
        const double c = pair(q, v);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * q[i];
      }
    }
    const double n = std::sqrt(pair(v, v));
    if (n < 1e-12) continue;
    for (auto& x : v) x /= n;
    done.push_back(std::move(v));
  }
  std::vector<ExteriorForm<double>> out;
  for (auto& v : done) out.emplace_back(label.grade, std::move(v));
  return out;
}

G2Structure<double> to_floating(const G2Structure<Rational>& s) {
  return G2Structure<double>(s.frame().cast<double>());
}

template class G2Structure<Rational>;
template class G2Structure<double>;
template std::vector<ExteriorForm<double>> type_basis(const G2Structure<Rational>&, TypeLabel);
template std::vector<ExteriorForm<double>> type_basis(const G2Structure<double>&, TypeLabel);

}  // namespace g2mu
