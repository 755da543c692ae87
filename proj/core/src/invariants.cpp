#include "g2mu/invariants.hpp"

namespace g2mu {

namespace {

struct PowerTraces {
  Rational t1, t2, t3;
};

PowerTraces power_traces(const Matrix<Rational>& a) {
  if (a.rows() != a.cols()) throw InputError("trace polynomial of a non-square matrix");
  const auto a2 = a * a;
  return {a.trace(), a2.trace(), (a2 * a).trace()};
}

}  // namespace

Rational tr8_su3(const Matrix<Rational>& a) {
  const auto t = power_traces(a);
  return (t.t1 * t.t1 - t.t2) / 2 - 2 * t.t1 + 1;
}

Rational tr12_su3(const Matrix<Rational>& a) {
  const auto t = power_traces(a);
  return (t.t1 * t.t1 * t.t1 + 2 * t.t3 - 3 * t.t2 * t.t1) / 6 - (t.t1 * t.t1 - t.t2) / 2 - 2;
}

InvariantPair mu_invariants(const OrbifoldGroup& group) {
  Rational s8 = 0, s12 = 0;
  for (const auto& g : group.elements()) {
    s8 += tr8_su3(g.matrix());
    s12 += tr12_su3(g.matrix());
  }
  const Rational n = static_cast<long>(group.order());
  return {-s8 / n, -s12 / n};
}

}  // namespace g2mu
