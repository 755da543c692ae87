#include "g2mu/exterior.hpp"

#include <bit>
#include <cmath>
#include <sstream>

namespace g2mu {

namespace {

struct BasisTables {
  std::array<std::vector<MultiIndex>, kDim + 1> by_grade;
  std::array<std::size_t, 128> position{};

  BasisTables() {
    // Lexicographic order of sorted index tuples; generated recursively.
    for (int p = 0; p <= kDim; ++p) {
      std::vector<int> current;
      auto rec = [&](auto&& self, int start) -> void {
        if (static_cast<int>(current.size()) == p) {
          std::uint8_t mask = 0;
          for (int i : current) mask |= static_cast<std::uint8_t>(1u << (i - 1));
          position[mask] = by_grade[p].size();
          by_grade[p].push_back(MultiIndex::from_mask(mask));
          return;
        }
        for (int i = start; i <= kDim; ++i) {
          current.push_back(i);
          self(self, i + 1);
          current.pop_back();
        }
      };
      rec(rec, 1);
    }
  }
};

const BasisTables& tables() {
  static const BasisTables t;
  return t;
}

void check_grade(int grade) {
  if (grade < 0 || grade > kDim) throw GradeError("grade " + std::to_string(grade) + " outside 0..7");
}

template <class S>
S minor(const Matrix<S>& m, MultiIndex rows, MultiIndex cols) {
  const auto r = rows.indices();
  const auto c = cols.indices();
  if (r.empty()) return S(1);
  Matrix<S> sub(r.size(), c.size());
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t j = 0; j < c.size(); ++j) sub(i, j) = m(r[i] - 1, c[j] - 1);
  return determinant(sub);
}

template <class S>
Matrix<S> induced_matrix(const Matrix<S>& m, int grade) {
  const auto& b = basis(grade);
  Matrix<S> out(b.size(), b.size());
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out(i, j) = minor(m, b[i], b[j]);
  return out;
}

template <class S>
S sqrt_exact(const S& x);

template <>
double sqrt_exact(const double& x) {
  return std::sqrt(x);
}

}  // namespace

// ---------------------------------------------------------------------------
// MultiIndex

MultiIndex MultiIndex::from_mask(std::uint8_t mask) {
  if (mask & 0x80u) throw GradeError("multi-index mask out of range");
  return MultiIndex(mask);
}

MultiIndex MultiIndex::of(std::initializer_list<int> indices) {
  std::uint8_t mask = 0;
  int last = 0;
  for (int i : indices) {
    if (i < 1 || i > kDim || i <= last) throw GradeError("multi-index must be strictly increasing in 1..7");
    mask |= static_cast<std::uint8_t>(1u << (i - 1));
    last = i;
  }
  return MultiIndex(mask);
}

MultiIndex MultiIndex::parse(const std::string& digits) {
  std::uint8_t mask = 0;
  int last = 0;
  for (char ch : digits) {
    const int i = ch - '0';
    if (i < 1 || i > kDim || i <= last) throw GradeError("bad multi-index '" + digits + "'");
    mask |= static_cast<std::uint8_t>(1u << (i - 1));
    last = i;
  }
  return MultiIndex(mask);
}

int MultiIndex::grade() const { return std::popcount(mask_); }

std::vector<int> MultiIndex::indices() const {
  std::vector<int> out;
  for (int i = 1; i <= kDim; ++i)
    if (contains(i)) out.push_back(i);
  return out;
}

std::string MultiIndex::str() const {
  std::string s;
  for (int i : indices()) s += static_cast<char>('0' + i);
  return s;
}

std::size_t basis_size(int grade) {
  check_grade(grade);
  return tables().by_grade[grade].size();
}

const std::vector<MultiIndex>& basis(int grade) {
  check_grade(grade);
  return tables().by_grade[grade];
}

std::size_t position(MultiIndex index) { return tables().position[index.mask()]; }

int wedge_sign(MultiIndex a, MultiIndex b) {
  if (a.mask() & b.mask()) return 0;
  int inversions = 0;
  for (int j = 0; j < kDim; ++j) {
    if (!((b.mask() >> j) & 1u)) continue;
    const unsigned above = a.mask() & ~((2u << j) - 1u);
    inversions += std::popcount(above);
  }
  return (inversions % 2) ? -1 : 1;
}

// ---------------------------------------------------------------------------
// ExteriorForm

template <class S>
ExteriorForm<S>::ExteriorForm(int grade) : grade_(grade), coeffs_(basis_size(grade), S(0)) {}

template <class S>
ExteriorForm<S>::ExteriorForm(int grade, std::vector<S> coeffs) : grade_(grade), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != basis_size(grade)) {
    throw GradeError("coefficient count " + std::to_string(coeffs_.size()) + " does not match grade " +
                     std::to_string(grade));
  }
}

template <class S>
ExteriorForm<S> ExteriorForm<S>::scalar(const S& value) {
  return ExteriorForm(0, {value});
}

template <class S>
ExteriorForm<S> ExteriorForm<S>::basis_form(MultiIndex index, const S& coeff) {
  ExteriorForm f(index.grade());
  f[index] = coeff;
  return f;
}

template <class S>
ExteriorForm<S> ExteriorForm<S>::covector(const Vec7<S>& components) {
  return ExteriorForm(1, std::vector<S>(components.begin(), components.end()));
}

template <class S>
const S& ExteriorForm<S>::operator[](MultiIndex index) const {
  if (index.grade() != grade_) throw GradeError("multi-index grade mismatch");
  return coeffs_[position(index)];
}

template <class S>
S& ExteriorForm<S>::operator[](MultiIndex index) {
  if (index.grade() != grade_) throw GradeError("multi-index grade mismatch");
  return coeffs_[position(index)];
}

template <class S>
bool ExteriorForm<S>::is_zero() const {
  for (const auto& c : coeffs_)
    if (!ScalarTraits<S>::is_zero(c)) return false;
  return true;
}

template <class S>
std::size_t ExteriorForm<S>::nonzero_count() const {
  std::size_t n = 0;
  for (const auto& c : coeffs_)
    if (!ScalarTraits<S>::is_zero(c)) ++n;
  return n;
}

template <class S>
double ExteriorForm<S>::max_magnitude() const {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, ScalarTraits<S>::magnitude(c));
  return m;
}

template <class S>
ExteriorForm<S>& ExteriorForm<S>::operator+=(const ExteriorForm& other) {
  if (other.grade_ != grade_) throw GradeError("cannot add forms of different grades");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

template <class S>
ExteriorForm<S>& ExteriorForm<S>::operator-=(const ExteriorForm& other) {
  if (other.grade_ != grade_) throw GradeError("cannot subtract forms of different grades");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

template <class S>
ExteriorForm<S>& ExteriorForm<S>::operator*=(const S& s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

// ---------------------------------------------------------------------------
// Metric7

template <class S>
Metric7<S>::Metric7(Matrix<S> gram, S vol) : gram_(std::move(gram)), vol_(std::move(vol)) {
  using Traits = ScalarTraits<S>;
  if (gram_.rows() != kDim || gram_.cols() != kDim) throw MetricError("metric must be 7x7");
  const double scale = gram_.max_magnitude();
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < i; ++j)
      if (!Traits::is_zero(gram_(i, j) - gram_(j, i), scale)) throw MetricError("metric is not symmetric");
  for (int k = 1; k <= kDim; ++k) {
    Matrix<S> lead(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) lead(i, j) = gram_(i, j);
    const S d = determinant(lead);
    if (Traits::is_zero(d, scale) || d < S(0)) throw MetricError("metric is not positive definite");
  }
  if (!(vol_ > S(0))) throw MetricError("volume factor must be positive");
  const S det = determinant(gram_);
  if (!Traits::is_zero(vol_ * vol_ - det, std::max(1.0, Traits::magnitude(det))))
    throw MetricError("volume factor does not square to det(gram)");
  inverse_ = g2mu::inverse(gram_);
  for (int p = 0; p <= kDim; ++p) induced_[p] = induced_matrix(inverse_, p);
}

template <class S>
Metric7<S> Metric7<S>::euclidean() {
  return Metric7(Matrix<S>::identity(kDim), S(1));
}

template <class S>
S Metric7<S>::pair(const Vec7<S>& u, const Vec7<S>& v) const {
  S acc(0);
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) acc += u[i] * gram_(i, j) * v[j];
  return acc;
}

template <class S>
Vec7<S> Metric7<S>::flat(const Vec7<S>& v) const {
  Vec7<S> out;
  for (int i = 0; i < kDim; ++i) {
    S acc(0);
    for (int j = 0; j < kDim; ++j) acc += gram_(i, j) * v[j];
    out[i] = acc;
  }
  return out;
}

Metric7<double> metric_from_gram(const Matrix<double>& gram) {
  const double det = determinant(gram);
  if (!(det > 0.0)) throw MetricError("metric is not positive definite");
  return Metric7<double>(gram, sqrt_exact(det));
}

template <class S>
Metric7<S> metric_from_frame(const Matrix<S>& frame) {
  if (frame.rows() != kDim || frame.cols() != kDim) throw MetricError("frame must be 7x7");
  const S det = determinant(frame);
  if (ScalarTraits<S>::is_zero(det, frame.max_magnitude())) throw MetricError("frame is singular");
  if (det < S(0)) throw MetricError("frame reverses orientation");
  return Metric7<S>(frame.transpose() * frame, det);
}

// ---------------------------------------------------------------------------
// Operations

template <class S>
ExteriorForm<S> wedge(const ExteriorForm<S>& a, const ExteriorForm<S>& b) {
  const int grade = a.grade() + b.grade();
  if (grade > kDim) throw GradeError("wedge product exceeds grade 7");
  ExteriorForm<S> out(grade);
  const auto& ba = basis(a.grade());
  const auto& bb = basis(b.grade());
  for (std::size_t i = 0; i < ba.size(); ++i) {
    if (a.coeffs()[i] == S(0)) continue;
    for (std::size_t j = 0; j < bb.size(); ++j) {
      if (b.coeffs()[j] == S(0)) continue;
      const int sign = wedge_sign(ba[i], bb[j]);
      if (sign == 0) continue;
      const auto target = MultiIndex::from_mask(ba[i].mask() | bb[j].mask());
      if (sign > 0)
        out[target] += a.coeffs()[i] * b.coeffs()[j];
      else
        out[target] -= a.coeffs()[i] * b.coeffs()[j];
    }
  }
  return out;
}

template <class S>
ExteriorForm<S> interior(const Vec7<S>& v, const ExteriorForm<S>& a) {
  if (a.grade() == 0) throw GradeError("interior product of a 0-form");
  ExteriorForm<S> out(a.grade() - 1);
  const auto& b = basis(a.grade());
  for (std::size_t k = 0; k < b.size(); ++k) {
    if (a.coeffs()[k] == S(0)) continue;
    const auto idx = b[k].indices();
    for (std::size_t pos = 0; pos < idx.size(); ++pos) {
      const int i = idx[pos];
      if (v[i - 1] == S(0)) continue;
      const auto rest = MultiIndex::from_mask(static_cast<std::uint8_t>(b[k].mask() & ~(1u << (i - 1))));
      const S term = v[i - 1] * a.coeffs()[k];
      if (pos % 2 == 0)
        out[rest] += term;
      else
        out[rest] -= term;
    }
  }
  return out;
}

template <class S>
S inner(const ExteriorForm<S>& a, const ExteriorForm<S>& b, const Metric7<S>& g) {
  if (a.grade() != b.grade()) throw GradeError("inner product of forms of different grades");
  const auto hb = g2mu::apply(g.induced(a.grade()), b.coeffs());
  S acc(0);
  for (std::size_t i = 0; i < hb.size(); ++i) acc += a.coeffs()[i] * hb[i];
  return acc;
}

template <class S>
ExteriorForm<S> hodge_star(const ExteriorForm<S>& a, const Metric7<S>& g) {
  const int p = a.grade();
  const auto raised = g2mu::apply(g.induced(p), a.coeffs());
  ExteriorForm<S> out(kDim - p);
  const auto& b = basis(p);
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (raised[i] == S(0)) continue;
    const auto comp = b[i].complement();
    const int sign = wedge_sign(b[i], comp);
    out[comp] += S(sign) * g.vol() * raised[i];
  }
  return out;
}

template <class S>
ExteriorForm<S> pullback(const Matrix<S>& a, const ExteriorForm<S>& form) {
  return apply(pullback_matrix(a, form.grade()), form, form.grade());
}

template <class S>
Matrix<S> wedge_matrix(const ExteriorForm<S>& omega, int grade) {
  const int target = omega.grade() + grade;
  if (target > kDim) throw GradeError("wedge product exceeds grade 7");
  const auto& src = basis(grade);
  Matrix<S> m(basis_size(target), src.size());
  for (std::size_t j = 0; j < src.size(); ++j) {
    const auto col = wedge(omega, ExteriorForm<S>::basis_form(src[j]));
    for (std::size_t i = 0; i < col.size(); ++i) m(i, j) = col.coeffs()[i];
  }
  return m;
}

template <class S>
Matrix<S> interior_matrix(const Vec7<S>& v, int grade) {
  if (grade == 0) throw GradeError("interior product of a 0-form");
  const auto& src = basis(grade);
  Matrix<S> m(basis_size(grade - 1), src.size());
  for (std::size_t j = 0; j < src.size(); ++j) {
    const auto col = interior(v, ExteriorForm<S>::basis_form(src[j]));
    for (std::size_t i = 0; i < col.size(); ++i) m(i, j) = col.coeffs()[i];
  }
  return m;
}

template <class S>
Matrix<S> star_matrix(const Metric7<S>& g, int grade) {
  const auto& src = basis(grade);
  Matrix<S> m(basis_size(kDim - grade), src.size());
  for (std::size_t j = 0; j < src.size(); ++j) {
    const auto col = hodge_star(ExteriorForm<S>::basis_form(src[j]), g);
    for (std::size_t i = 0; i < col.size(); ++i) m(i, j) = col.coeffs()[i];
  }
  return m;
}

template <class S>
Matrix<S> pullback_matrix(const Matrix<S>& a, int grade) {
  if (a.rows() != kDim || a.cols() != kDim) throw GradeError("pullback needs a 7x7 matrix");
  // (A*θ^I) = Σ_J det(A[I,J]) θ^J, so column I holds the minors of row set I.
  return induced_matrix(a, grade).transpose();
}

template <class S>
Matrix<S> metric_adjoint(const Matrix<S>& map, int from_grade, int to_grade, const Metric7<S>& g) {
  return inverse(g.induced(from_grade)) * map.transpose() * g.induced(to_grade);
}

std::string to_string(const ExteriorForm<Rational>& form) {
  std::ostringstream os;
  bool first = true;
  const auto& b = basis(form.grade());
  for (std::size_t i = 0; i < b.size(); ++i) {
    const auto& c = form.coeffs()[i];
    if (c == 0) continue;
    if (!first) os << (c > 0 ? " + " : " - ");
    else if (c < 0) os << "-";
    const Rational mag = c < 0 ? Rational(-c) : c;
    if (mag != 1 || form.grade() == 0) os << format_rational(mag);
    if (form.grade() > 0) os << "θ" << b[i].str();
    first = false;
  }
  return first ? "0" : os.str();
}

// ---------------------------------------------------------------------------
// Instantiations

#define G2MU_FORM_OPS(S)                                                              \
  template class ExteriorForm<S>;                                                     \
  template ExteriorForm<S> wedge(const ExteriorForm<S>&, const ExteriorForm<S>&);     \
  template ExteriorForm<S> interior(const Vec7<S>&, const ExteriorForm<S>&);          \
  template ExteriorForm<S> pullback(const Matrix<S>&, const ExteriorForm<S>&);        \
  template Matrix<S> wedge_matrix(const ExteriorForm<S>&, int);                       \
  template Matrix<S> interior_matrix(const Vec7<S>&, int);                            \
  template Matrix<S> pullback_matrix(const Matrix<S>&, int);

#define G2MU_METRIC_OPS(S)                                                            \
  template class Metric7<S>;                                                          \
  template Metric7<S> metric_from_frame(const Matrix<S>&);                            \
  template S inner(const ExteriorForm<S>&, const ExteriorForm<S>&, const Metric7<S>&); \
  template ExteriorForm<S> hodge_star(const ExteriorForm<S>&, const Metric7<S>&);     \
  template Matrix<S> star_matrix(const Metric7<S>&, int);                             \
  template Matrix<S> metric_adjoint(const Matrix<S>&, int, int, const Metric7<S>&);

G2MU_FORM_OPS(Rational)
G2MU_FORM_OPS(double)
G2MU_FORM_OPS(Complex)
G2MU_METRIC_OPS(Rational)
G2MU_METRIC_OPS(double)

}  // namespace g2mu
