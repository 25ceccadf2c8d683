#include <benchmark/benchmark.h>

#include <vector>

#include "pimcc/collectives.hpp"
#include "pimcc/rng.hpp"

using namespace pimcc;

namespace {

// Simulation throughput of a whole collective, baseline vs fully optimized.
// Counter deltas are what the library is for; this tracks how fast the
// simulator itself turns them over.
void run_collective(benchmark::State& state, Primitive p, TechniqueFlags flags) {
  Topology topo = make_topology(1, 1);
  std::vector<std::uint32_t> dims{8, 8};
  HypercubeConfig hc = make_hypercube(dims, topo);
  const std::uint64_t bpp = 4096;

  CommRequest req;
  req.primitive = p;
  req.dtype = ElementType::u32;
  req.op = ReduceOp::sum;
  req.bytes_per_pe = bpp;
  req.mask = parse_mask("10", hc);
  req.flags = flags;

  PimMachine m(topo);
  Rng rng(7);
  for (std::uint64_t pe = 0; pe < hc.nodes(); ++pe) {
    m.ensure_mram(static_cast<PeId>(pe), bpp);
    for (auto& b : m.mram(static_cast<PeId>(pe))) b = rng.next_byte();
  }

  for (auto _ : state) {
    RunReport r = run_request(m, hc, req);
    benchmark::DoNotOptimize(r.counters.bus_bytes);
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) * hc.nodes() * bpp);
}

void bm_alltoall_baseline(benchmark::State& state) {
  run_collective(state, Primitive::alltoall, {false, false, false});
}
BENCHMARK(bm_alltoall_baseline);

void bm_alltoall_full(benchmark::State& state) {
  run_collective(state, Primitive::alltoall, {true, true, true});
}
BENCHMARK(bm_alltoall_full);

void bm_all_reduce_baseline(benchmark::State& state) {
  run_collective(state, Primitive::all_reduce, {false, false, false});
}
BENCHMARK(bm_all_reduce_baseline);

void bm_all_reduce_optimized(benchmark::State& state) {
  run_collective(state, Primitive::all_reduce, {true, true, false});
}
BENCHMARK(bm_all_reduce_optimized);

}  // namespace
