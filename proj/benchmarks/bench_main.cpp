#include <memory>
#include <random>

#include <benchmark/benchmark.h>

#include "g2mu/epstein.hpp"
#include "g2mu/fourier.hpp"
#include "g2mu/spectral.hpp"

using namespace g2mu;

namespace {

AffineElement involution(std::array<int, kDim> signs, int shifted_axis = -1) {
  Vec7<Rational> t;
  t.fill(Rational(0));
  if (shifted_axis >= 0) t[shifted_axis] = Rational(1, 2);
  return diagonal_element(signs, t);
}

JoyceOrbifold three_involutions() {
  const auto a = involution({1, 1, 1, -1, -1, -1, -1});
  const auto b = involution({1, -1, -1, 1, 1, -1, -1}, 6);
  auto c = involution({-1, 1, -1, 1, -1, 1, -1}, 6);
  Vec7<Rational> t = c.translation();
  t[2] = Rational(1, 2);
  c = AffineElement(c.matrix(), t);
  return validate_joyce(generate({a, b, c}), Matrix<Rational>::identity(kDim));
}

void BM_IdentityTrialFloating(benchmark::State& state) {
  const auto s = std::make_shared<const G2Structure<double>>(Matrix<double>::identity(kDim));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto report = verify_identities(s, 1, seed++);
    benchmark::DoNotOptimize(report);
  }
}
BENCHMARK(BM_IdentityTrialFloating)->Unit(benchmark::kMillisecond);

void BM_ModeSpaceBuild(benchmark::State& state) {
  const auto s = G2Structure<Rational>::standard();
  const auto kind = state.range(0) ? ModeKind::Hprime : ModeKind::H;
  const LatticeVector k{1, -2, 0, 1, 3, 0, 1};
  for (auto _ : state) benchmark::DoNotOptimize(build_mode_space(s, kind, k));
}
BENCHMARK(BM_ModeSpaceBuild)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_SpectralReport(benchmark::State& state) {
  const auto o = three_involutions();
  const Rational radius(state.range(0));
  for (auto _ : state) {
    ModeSpaceCache cache(std::make_shared<const G2Structure<Rational>>(o.structure));
    benchmark::DoNotOptimize(spectral_report(o, radius, &cache));
  }
}
BENCHMARK(BM_SpectralReport)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_EpsteinRankSeven(benchmark::State& state) {
  const auto lat = make_lattice(Matrix<double>::identity(kDim));
  for (auto _ : state) benchmark::DoNotOptimize(value_at_zero(lat));
}
BENCHMARK(BM_EpsteinRankSeven)->Unit(benchmark::kMicrosecond);

void BM_ClosedFormMu(benchmark::State& state) {
  const auto o = three_involutions();
  for (auto _ : state) benchmark::DoNotOptimize(closed_form_mu(o));
}
BENCHMARK(BM_ClosedFormMu)->Unit(benchmark::kMillisecond);

}  // namespace
