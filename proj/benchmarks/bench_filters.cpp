#include "filterforge/fff.hpp"
#include "filterforge/figure1.hpp"
#include "filterforge/gff.hpp"
#include "filterforge/magnus.hpp"
#include "filterforge/orders.hpp"
#include "filterforge/spectra.hpp"

#include <benchmark/benchmark.h>

using namespace filterforge;

namespace {

const std::vector<PauliAxis> kZ{PauliAxis::z};

void BM_MomentTableUdd(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  ControlMatrix cm(udd_sequence(n, 1.0), kZ);
  const auto idx = IndexTuple::repeated(3, PauliAxis::z, PauliAxis::z);
  for (auto _ : state) benchmark::DoNotOptimize(fff_taylor(cm, idx, n));
}
BENCHMARK(BM_MomentTableUdd)->Arg(2)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_FffValueDouble(benchmark::State& state) {
  const int alpha = static_cast<int>(state.range(0));
  ControlMatrix cm(cdd_sequence(3, Rational(1)), kZ);
  const auto idx = IndexTuple::repeated(alpha, PauliAxis::z, PauliAxis::z);
  std::vector<double> w(alpha, 1.7);
  for (auto _ : state) benchmark::DoNotOptimize(fff_value<double>(cm, idx, std::span<const double>(w)));
}
BENCHMARK(BM_FffValueDouble)->DenseRange(1, 4);

void BM_FffValueReal(benchmark::State& state) {
  ControlMatrix cm(udd_sequence(4, 1.0), kZ);
  const auto idx = IndexTuple::repeated(2, PauliAxis::z, PauliAxis::z);
  std::vector<Real> w{Real(0.3), Real(-1.1)};
  for (auto _ : state) benchmark::DoNotOptimize(fff_value<Real>(cm, idx, std::span<const Real>(w)));
}
BENCHMARK(BM_FffValueReal);

void BM_GffValue(benchmark::State& state) {
  const int alpha = static_cast<int>(state.range(0));
  std::vector<double> w(alpha, 0.9);
  ControlMatrix full(udd_sequence(4, 1.0), {PauliAxis::x, PauliAxis::y, PauliAxis::z});
  const auto mixed = IndexTuple::repeated(alpha, PauliAxis::z, PauliAxis::z);
  for (auto _ : state) benchmark::DoNotOptimize(gff_value<double>(full, mixed, std::span<const double>(w)));
}
BENCHMARK(BM_GffValue)->DenseRange(1, 3);

void BM_AnalyzeOrders(benchmark::State& state) {
  ControlMatrix cm(udd_sequence(static_cast<int>(state.range(0)), 1.0), kZ);
  for (auto _ : state) benchmark::DoNotOptimize(analyze_orders(cm));
}
BENCHMARK(BM_AnalyzeOrders)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_MagnusTerms(benchmark::State& state) {
  ControlMatrix cm(cdd_sequence(3, Rational(1)), kZ);
  const ToyNoiseModel model{ToyKind::quantum_single_tone, 9.0 / 40, 1.0, 0.0};
  MagnusOptions opt;
  opt.method = state.range(0) ? MagnusMethod::closed_form : MagnusMethod::quadrature;
  for (auto _ : state) benchmark::DoNotOptimize(magnus_terms(cm, model, 1.0, 3, opt));
}
BENCHMARK(BM_MagnusTerms)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Figure1Cells(benchmark::State& state) {
  const auto grid = log_grid(1e-3, 10, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(figure1_scan(grid, figure1_default_couplings()));
}
BENCHMARK(BM_Figure1Cells)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_ChiLorentzian(benchmark::State& state) {
  ControlMatrix cm(udd_sequence(static_cast<int>(state.range(0)), 1.0), kZ);
  const auto s = NoiseSpectrum::lorentzian(1.0, 2.0, 5.0);
  for (auto _ : state) benchmark::DoNotOptimize(chi_gaussian(cm, s, 1.0));
}
BENCHMARK(BM_ChiLorentzian)->Arg(2)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
