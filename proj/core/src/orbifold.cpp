#include "g2mu/orbifold.hpp"

#include <deque>
#include <set>

namespace g2mu {

namespace {

Vec7<Rational> reduce(const Vec7<Rational>& t) {
  Vec7<Rational> out;
  for (int i = 0; i < kDim; ++i) out[i] = mod1(t[i]);
  return out;
}

Vec7<Rational> zero_translation() {
  Vec7<Rational> t;
  t.fill(Rational(0));
  return t;
}

}  // namespace

AffineElement::AffineElement() : matrix_(Matrix<Rational>::identity(kDim)), translation_(zero_translation()) {}

AffineElement::AffineElement(Matrix<Rational> matrix, Vec7<Rational> translation)
    : matrix_(std::move(matrix)), translation_(reduce(translation)) {
  if (matrix_.rows() != kDim || matrix_.cols() != kDim) throw InputError("group element matrix must be 7x7");
  for (std::size_t i = 0; i < kDim; ++i)
    for (std::size_t j = 0; j < kDim; ++j)
      if (denominator(matrix_(i, j)) != 1) throw InputError("group element matrix has a non-integer entry");
  const Rational det = determinant(matrix_);
  if (det != 1) throw NonUnimodular("group element has determinant " + format_rational(det) + ", expected 1");
}

bool AffineElement::is_identity() const { return *this == AffineElement(); }

std::string AffineElement::key() const {
  std::string k;
  for (std::size_t i = 0; i < kDim; ++i)
    for (std::size_t j = 0; j < kDim; ++j) k += format_rational(matrix_(i, j)) + ",";
  k += "|";
  for (const auto& x : translation_) k += format_rational(x) + ",";
  return k;
}

AffineElement compose(const AffineElement& a, const AffineElement& b) {
  const auto moved = g2mu::apply(a.matrix(), std::vector<Rational>(b.translation().begin(), b.translation().end()));
  Vec7<Rational> t;
  for (int i = 0; i < kDim; ++i) t[i] = moved[i] + a.translation()[i];
  return AffineElement(a.matrix() * b.matrix(), t);
}

AffineElement inverse(const AffineElement& a) {
  const auto inv = g2mu::inverse(a.matrix());
  const auto moved = g2mu::apply(inv, std::vector<Rational>(a.translation().begin(), a.translation().end()));
  Vec7<Rational> t;
  for (int i = 0; i < kDim; ++i) t[i] = -moved[i];
  return AffineElement(inv, t);
}

AffineElement diagonal_element(const std::array<int, kDim>& signs, const Vec7<Rational>& translation) {
  Matrix<Rational> m(kDim, kDim);
  for (int i = 0; i < kDim; ++i) m(i, i) = signs[i];
  return AffineElement(m, translation);
}

OrbifoldGroup generate(const std::vector<AffineElement>& generators, std::size_t cap) {
  if (cap < 1) throw InputError("group order cap must be at least 1");
  OrbifoldGroup g;
  std::set<std::string> seen;
  std::deque<AffineElement> queue;
  const AffineElement e;
  seen.insert(e.key());
  g.elements_.push_back(e);
  queue.push_back(e);
  while (!queue.empty()) {
    const AffineElement x = queue.front();
    queue.pop_front();
    for (const auto& s : generators) {
      AffineElement y = compose(s, x);
      if (!seen.insert(y.key()).second) continue;
      if (g.elements_.size() + 1 > cap)
        throw NonFinite("group closure exceeds " + std::to_string(cap) + " elements");
      g.elements_.push_back(y);
      queue.push_back(std::move(y));
    }
  }
  return g;
}

JoyceOrbifold validate_joyce(const OrbifoldGroup& group, const Matrix<Rational>& frame) {
  G2Structure<Rational> structure(frame);
  for (std::size_t i = 0; i < group.order(); ++i) {
    if (!structure.is_g2_element(group[i].matrix()))
      throw NotG2Compatible("element " + std::to_string(i) + " does not preserve φ = F*φ₀", i);
  }
  return JoyceOrbifold{group, std::move(structure)};
}

}  // namespace g2mu
