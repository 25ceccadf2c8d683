#include <benchmark/benchmark.h>

#include <vector>

#include "pimcc/codec.hpp"
#include "pimcc/rng.hpp"

using namespace pimcc;

namespace {

std::vector<Block64> random_blocks(std::size_t n) {
  Rng rng(42);
  std::vector<Block64> blocks(n);
  for (auto& b : blocks)
    for (auto& x : b.bytes) x = rng.next_byte();
  return blocks;
}

void bm_domain_transfer(benchmark::State& state) {
  auto blocks = random_blocks(1024);
  for (auto _ : state) {
    for (auto& b : blocks) benchmark::DoNotOptimize(domain_transfer(b));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) * 1024 * 64);
}
BENCHMARK(bm_domain_transfer);

void bm_rot_lane(benchmark::State& state) {
  auto blocks = random_blocks(1024);
  unsigned k = 3;
  for (auto _ : state) {
    for (auto& b : blocks) benchmark::DoNotOptimize(rot_lane(b, k));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) * 1024 * 64);
}
BENCHMARK(bm_rot_lane);

// The rotation a pipeline pays without fusion: transpose, word rotate,
// transpose back. Compare against bm_rot_lane, its fused equivalent.
void bm_unfused_modulation(benchmark::State& state) {
  auto blocks = random_blocks(1024);
  unsigned k = 3;
  for (auto _ : state) {
    for (auto& b : blocks)
      benchmark::DoNotOptimize(domain_transfer(rot_word(domain_transfer(b), k)));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) * 1024 * 64);
}
BENCHMARK(bm_unfused_modulation);

void bm_reduce_u32_sum(benchmark::State& state) {
  auto blocks = random_blocks(1024);
  Block64 acc;
  for (auto _ : state) {
    for (auto& b : blocks)
      benchmark::DoNotOptimize(acc = reduce_host_words(acc, b, ElementType::u32, ReduceOp::sum));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) * 1024 * 64);
}
BENCHMARK(bm_reduce_u32_sum);

}  // namespace
