// Serial reference vs OpenMP kernels on the same seeded workloads.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include <omp.h>

#include "bsc/analysis.hpp"

namespace {

template <class F>
double seconds(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t trials = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 2000;
  using namespace bsc;

  GenerationSchedule g;
  g.tau1 = 3.0;
  g.tau2 = 2.0;
  g.set_field_gap(4.0);
  const SweepCase gen_case = GenerationCase{g};
  const JitterModel model{1e-2, JitterDistribution::uniform, 7};

  SweepReport serial, parallel;
  const double ts = seconds([&] { serial = jitter_sweep_serial(gen_case, model, trials); });
  const double tp = seconds([&] { parallel = jitter_sweep(gen_case, model, trials); });
  const bool same_sweep = serial.fidelity.mean == parallel.fidelity.mean &&
                          serial.fidelity.q05 == parallel.fidelity.q05;

  CoherenceSchedule c;
  c.base.t1 = 1.0;
  c.base.t2 = 1.5;
  c.base.Tprime = 3.0;
  c.t1p = 0.5;
  c.t2p = 0.5;
  const HilbertLayout layout(8, 2);
  const auto events = build_coherence(c);
  const auto initial = cat_state(layout, CatSpec{});
  const RngStream rng(11);
  const std::size_t shots = trials * 10;
  EmpiricalDistribution es, ep;
  const double ss = seconds([&] { es = outcome_statistics_serial(events, initial, c.base.params, shots, rng); });
  const double sp = seconds([&] { ep = outcome_statistics(events, initial, c.base.params, shots, rng); });

  std::printf("threads: %d\n", omp_get_max_threads());
  std::printf("%-22s %10s %10s %8s %s\n", "kernel", "serial[s]", "omp[s]", "speedup", "identical");
  std::printf("%-22s %10.4f %10.4f %8.2f %s\n", "jitter_sweep", ts, tp, ts / tp, same_sweep ? "yes" : "NO");
  std::printf("%-22s %10.4f %10.4f %8.2f %s\n", "outcome_statistics", ss, sp, ss / sp,
              es.counts == ep.counts ? "yes" : "NO");
  return same_sweep && es.counts == ep.counts ? 0 : 1;
}
