#include <numeric>

#include "doctest.h"
#include "pimcc/error.hpp"
#include "pimcc/machine.hpp"
#include "pimcc/rng.hpp"

using namespace pimcc;

namespace {

PimMachine fresh() { return PimMachine(make_topology(1, 1)); }

}  // namespace

TEST_CASE("read_burst interleaves member bytes into lanes") {
  PimMachine m = fresh();
  EntangledGroup eg = entangled_group_by_id(m.topology(), 0);
  for (unsigned i = 0; i < 8; ++i) {
    m.ensure_mram(eg.members[i], 8);
    for (auto& b : m.mram(eg.members[i])) b = static_cast<std::uint8_t>(i);
  }
  Block64 b = m.read_burst(eg, 0);
  for (unsigned beat = 0; beat < 8; ++beat)
    for (unsigned lane = 0; lane < 8; ++lane) CHECK(b[beat * 8 + lane] == lane);
  CHECK(m.snapshot_counters().bus_bytes == 64);
}

TEST_CASE("burst round trip") {
  PimMachine m = fresh();
  EntangledGroup eg = entangled_group_by_id(m.topology(), 2);
  Rng rng(21);
  Block64 b;
  for (auto& x : b.bytes) x = rng.next_byte();
  m.write_burst(eg, 16, b);
  CHECK(m.read_burst(eg, 16) == b);
  // lane i landed in member i's MRAM
  for (unsigned i = 0; i < 8; ++i)
    for (unsigned beat = 0; beat < 8; ++beat)
      CHECK(m.mram(eg.members[i])[16 + beat] == b[beat * 8 + i]);
}

TEST_CASE("bursts demand alignment and existing bytes") {
  PimMachine m = fresh();
  EntangledGroup eg = entangled_group_by_id(m.topology(), 0);
  Block64 b;
  CHECK_THROWS_AS(m.write_burst(eg, 4, b), Error);
  CHECK_THROWS_AS(m.read_burst(eg, 0), Error);  // MRAM never grown
  try {
    m.read_burst(eg, 8);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::short_mram);
  }
}

TEST_CASE("block rotate kernel") {
  PimMachine m = fresh();
  m.ensure_mram(3, 32);
  auto& mem = m.mram(3);
  std::iota(mem.begin(), mem.end(), 0);  // blocks A,B,C,D of 8 bytes

  m.pe_kernel_block_rotate(3, 0, 8, 4, 1);
  // [A,B,C,D] -> [B,C,D,A]
  for (unsigned i = 0; i < 8; ++i) {
    CHECK(mem[i] == 8 + i);
    CHECK(mem[24 + i] == i);
  }
  CostCounters c = m.snapshot_counters();
  CHECK(c.pe_moved_bytes == 32);
  CHECK(c.kernel_launches == 1);

  // zero rotation still runs the kernel
  m.pe_kernel_block_rotate(3, 0, 8, 4, 0);
  CHECK(m.snapshot_counters().pe_moved_bytes == 64);
  CHECK(m.snapshot_counters().kernel_launches == 2);

  CHECK_THROWS_AS(m.pe_kernel_block_rotate(3, 0, 8, 5, 0), Error);  // past region end
}

TEST_CASE("block rotations compose") {
  PimMachine m = fresh();
  Rng rng(22);
  m.ensure_mram(0, 64);
  m.ensure_mram(1, 64);
  for (unsigned i = 0; i < 64; ++i) {
    std::uint8_t v = rng.next_byte();
    m.mram(0)[i] = v;
    m.mram(1)[i] = v;
  }
  m.pe_kernel_block_rotate(0, 0, 8, 8, 3);
  m.pe_kernel_block_rotate(0, 0, 8, 8, 6);
  m.pe_kernel_block_rotate(1, 0, 8, 8, (3 + 6) % 8);
  CHECK(m.mram(0) == m.mram(1));
}

TEST_CASE("permute kernel") {
  PimMachine m = fresh();
  m.ensure_mram(5, 16);
  std::iota(m.mram(5).begin(), m.mram(5).end(), 0);
  std::uint32_t swap[] = {1, 0};
  m.pe_kernel_permute(5, 0, 8, swap);
  CHECK(m.mram(5)[0] == 8);
  CHECK(m.mram(5)[8] == 0);
  m.pe_kernel_permute(5, 0, 8, swap);  // own inverse
  CHECK(m.mram(5)[0] == 0);
  CHECK(m.snapshot_counters().pe_moved_bytes == 32);

  std::uint32_t dup[] = {0, 0};
  CHECK_THROWS_AS(m.pe_kernel_permute(5, 0, 8, dup), Error);
}

TEST_CASE("permute then inverse restores a random region") {
  PimMachine m = fresh();
  Rng rng(23);
  m.ensure_mram(7, 80);
  for (auto& b : m.mram(7)) b = rng.next_byte();
  auto orig = m.mram(7);
  std::vector<std::uint32_t> perm{4, 2, 0, 9, 7, 5, 3, 1, 8, 6};
  std::vector<std::uint32_t> inv(10);
  for (std::uint32_t s = 0; s < 10; ++s) inv[perm[s]] = s;
  m.pe_kernel_permute(7, 0, 8, perm);
  m.pe_kernel_permute(7, 0, 8, inv);
  CHECK(m.mram(7) == orig);
}

TEST_CASE("host staging") {
  PimMachine m = fresh();
  std::vector<std::uint8_t> data(64, 0xab);
  std::uint64_t h = m.host_stage(data);
  CHECK(m.snapshot_counters().host_staged_bytes == 64);
  CHECK(m.host_unstage(h) == data);
  CHECK_THROWS_AS(m.host_unstage(h), Error);  // handle consumed
}

TEST_CASE("counters reset and facade accounting") {
  PimMachine m = fresh();
  CHECK(m.snapshot_counters() == CostCounters{});
  Block64 b;
  m.dt(b);
  m.rot_word(b, 1);
  m.rot_lane(b, 1, 4);
  m.reduce(b, b, ElementType::u32, ReduceOp::sum);
  CostCounters c = m.snapshot_counters();
  CHECK(c.dt_blocks == 1);
  CHECK(c.host_rot_ops == 2);
  CHECK(c.host_reduce_ops == 1);
  CHECK(m.snapshot_counters() == c);  // snapshot has no side effects
  m.reset_counters();
  CHECK(m.snapshot_counters() == CostCounters{});
}

TEST_CASE("kernels only touch their own PE") {
  PimMachine m = fresh();
  m.ensure_mram(0, 16);
  m.ensure_mram(1, 16);
  m.mram(1).assign(16, 0x55);
  auto other = m.mram(1);
  std::iota(m.mram(0).begin(), m.mram(0).end(), 0);
  m.pe_kernel_block_rotate(0, 0, 8, 2, 1);
  CHECK(m.mram(1) == other);
}
