#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "pimcc/codec.hpp"
#include "pimcc/topology.hpp"

namespace pimcc {

struct CostCounters {
  std::uint64_t bus_bytes = 0;         // bytes moved host <-> PIM
  std::uint64_t dt_blocks = 0;         // domain_transfer applications
  std::uint64_t host_rot_ops = 0;      // rot_word/rot_lane/permute applications
  std::uint64_t host_reduce_ops = 0;   // reduce_host_words applications
  std::uint64_t host_staged_bytes = 0; // bytes written to host staging memory
  std::uint64_t pe_moved_bytes = 0;    // bytes moved by PE-side reorder kernels
  std::uint64_t kernel_launches = 0;   // PE kernel invocations

  CostCounters operator-(const CostCounters& o) const;
  std::string to_json() const;

  friend bool operator==(const CostCounters&, const CostCounters&) = default;
};

// The simulated machine: per-PE MRAM byte stores, burst-granularity host
// access over entangled groups, PE-side reorder kernels, host staging memory,
// and the instrumented codec facade that collectives must route through so
// the counter ledger is complete.
class PimMachine {
 public:
  explicit PimMachine(const Topology& topo);

  const Topology& topology() const { return topo_; }

  // --- host <-> PIM bursts -----------------------------------------------
  // Returns the PIM-domain block where lane i carries bytes [offset,
  // offset+8) of member i's MRAM. offset must be a multiple of 8.
  Block64 read_burst(const EntangledGroup& group, std::uint64_t offset);
  void write_burst(const EntangledGroup& group, std::uint64_t offset, const Block64& b);

  // --- PE-side kernels ----------------------------------------------------
  // Cyclically rotates num_blocks blocks of block_size bytes at base left by
  // rotate_by slots (slot s moves to (s - rotate_by) mod num_blocks).
  void pe_kernel_block_rotate(PeId pe, std::uint64_t base, std::uint64_t block_size,
                              std::uint64_t num_blocks, std::uint64_t rotate_by);
  // New slot s holds old block perm[s].
  void pe_kernel_permute(PeId pe, std::uint64_t base, std::uint64_t block_size,
                         std::span<const std::uint32_t> perm);

  // --- host staging memory ------------------------------------------------
  std::uint64_t host_stage(std::span<const std::uint8_t> bytes);
  std::vector<std::uint8_t> host_unstage(std::uint64_t handle);

  // --- instrumented codec facade -----------------------------------------
  Block64 dt(const Block64& b);
  Block64 rot_word(const Block64& b, unsigned k, unsigned width = 8);
  Block64 rot_lane(const Block64& b, unsigned k, unsigned width = 8);
  Block64 permute_words(const Block64& b, const std::array<std::uint8_t, 8>& perm);
  Block64 permute_lanes(const Block64& b, const std::array<std::uint8_t, 8>& perm);
  Block64 reduce(const Block64& acc, const Block64& b, ElementType dtype, ReduceOp op);
  // Folds the listed host-domain words of b into one word.
  std::uint64_t fold_words(const Block64& b, std::span<const std::uint8_t> word_idx,
                           ElementType dtype, ReduceOp op);

  // --- counters -----------------------------------------------------------
  CostCounters snapshot_counters() const { return counters_; }
  void reset_counters() { counters_ = CostCounters{}; }

  // --- direct MRAM access (test/harness setup; not a modeled transfer) ----
  std::vector<std::uint8_t>& mram(PeId pe);
  const std::vector<std::uint8_t>& mram(PeId pe) const;
  void ensure_mram(PeId pe, std::uint64_t size);

 private:
  Topology topo_;
  std::vector<std::vector<std::uint8_t>> mram_;
  std::unordered_map<std::uint64_t, std::vector<std::uint8_t>> staged_;
  std::uint64_t next_handle_ = 1;
  CostCounters counters_;
};

}  // namespace pimcc
