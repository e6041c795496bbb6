// OpenMP kernels against their serial references. Each pair computes the
// same result; the fixture checks that once before timing.

#include <benchmark/benchmark.h>

#include <cmath>
#include <cstdlib>
#include <iostream>

#include "thk/cyl_area.hpp"
#include "thk/dilatation.hpp"
#include "thk/qc_maps.hpp"

using namespace thk;

namespace {

const EntireMap kExp = EntireMap::exponential();
const EntireMap kCos = EntireMap::cosine(0.5, 0.5);
const Exclusion kD{{cplx(0.0), 1.5}};  // covers the critical values of cosh

const EntireMap& family(int k) { return k == 0 ? kExp : kCos; }

void check_area_agrees(const EntireMap& f, double rho, long long budget) {
  AreaEstimate a = aap_integral(f, kD, rho, 1.0, 1, budget), b = aap_integral_reference(f, kD, rho, 1.0, 1, budget);
  if (a.value != b.value || a.std_error != b.std_error) {
    std::cerr << "parallel and serial area estimates differ\n";
    std::abort();
  }
}

void BM_area_parallel(benchmark::State& st) {
  const EntireMap& f = family(static_cast<int>(st.range(0)));
  double rho = std::exp(static_cast<double>(st.range(1)));
  long long budget = st.range(2);
  check_area_agrees(f, rho, budget);
  for (auto _ : st) benchmark::DoNotOptimize(aap_integral(f, kD, rho, 1.0, 1, budget).value);
}

void BM_area_serial(benchmark::State& st) {
  const EntireMap& f = family(static_cast<int>(st.range(0)));
  double rho = std::exp(static_cast<double>(st.range(1)));
  long long budget = st.range(2);
  for (auto _ : st) benchmark::DoNotOptimize(aap_integral_reference(f, kD, rho, 1.0, 1, budget).value);
}

QcMap bench_map() {
  return QcMap::composite({QcMap::radial_stretch(0.5, 0.25), QcMap::annulus_twist(1.0, 0.3, 0.9)});
}

void BM_dilatation_parallel(benchmark::State& st) {
  QcMap m = bench_map();
  int n = static_cast<int>(st.range(0));
  GridSpec g = GridSpec::cartesian(-1.2, 1.2, -1.2, 1.2, n, n);
  PlaneMap pm = [&](cplx z) { return m(z); };
  if (measure_dilatation(pm, g).sup_D != measure_dilatation_reference(pm, g).sup_D) {
    std::cerr << "parallel and serial dilatation fields differ\n";
    std::abort();
  }
  for (auto _ : st) benchmark::DoNotOptimize(measure_dilatation(pm, g).sup_D);
}

void BM_dilatation_serial(benchmark::State& st) {
  QcMap m = bench_map();
  int n = static_cast<int>(st.range(0));
  GridSpec g = GridSpec::cartesian(-1.2, 1.2, -1.2, 1.2, n, n);
  PlaneMap pm = [&](cplx z) { return m(z); };
  for (auto _ : st) benchmark::DoNotOptimize(measure_dilatation_reference(pm, g).sup_D);
}

// family (0 exp, 1 cosine), log rho, budget
void area_args(benchmark::internal::Benchmark* b) {
  for (int fam : {0, 1})
    for (int L : {8, 12}) b->Args({fam, L, 200000});
  b->Unit(benchmark::kMillisecond);
}

}  // namespace

BENCHMARK(BM_area_parallel)->Apply(area_args)->UseRealTime();
BENCHMARK(BM_area_serial)->Apply(area_args)->UseRealTime();
BENCHMARK(BM_dilatation_parallel)->Arg(64)->Arg(192)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_dilatation_serial)->Arg(64)->Arg(192)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
