#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "pimcc/collectives.hpp"
#include "pimcc/hypercube.hpp"
#include "pimcc/machine.hpp"

namespace pimcc::detail {

// Sibling communication groups that live in the same set of entangled
// groups. They are processed together so every burst is touched once.
struct Clique {
  std::vector<std::uint32_t> egs;                 // shared entangled group ids, size K
  std::vector<std::size_t> group_index;           // indices into the group list
  std::vector<std::vector<std::uint8_t>> lanes;   // per sibling, sorted lane set (size w)
  unsigned w = 0;
  std::array<std::int8_t, 8> owner{};             // lane -> sibling index, -1 if unused
  std::array<std::int8_t, 8> lane_idx{};          // lane -> index within its sibling's lane set
  bool has_unused = false;
  bool aligned_runs = false;  // every lane set is a contiguous aligned w-run
};

// Per-request context shared by the staged and streamed pipelines. Every
// group induced by one mask has the same (w, K) product structure: member
// m of a group is lane lanes[m % w] of entangled group egs[m / w].
struct Ctx {
  const HypercubeConfig* hc = nullptr;
  CommRequest req;
  EngineOptions opts;
  std::vector<CommGroup> groups;
  std::vector<Clique> cliques;
  std::uint64_t G = 0;        // group size
  unsigned w = 0;             // lanes per group inside one entangled group
  std::uint64_t K = 0;        // entangled groups per communication group
  std::uint64_t S = 0;        // slot size bytes_per_pe / G (slotted primitives)
  bool slotted = false;       // bytes_per_pe divisible by 8 * G
  std::uint64_t in_bytes_pe = 0;
  std::uint64_t out_bytes_pe = 0;  // MRAM output region per PE (0 for gather/reduce)
};

Ctx build_ctx(const HypercubeConfig& hc, const CommRequest& req, const EngineOptions& opts);

bool pr_applicable(Primitive p);
bool cm_applicable(Primitive p, ElementType dtype);

// PE-side localization kernels (PR) and their plain-array mirrors used by
// the staged pipeline to account for data that is physically rotated in
// MRAM.
void run_pre_kernels(PimMachine& m, const Ctx& ctx);
void run_post_kernels(PimMachine& m, const Ctx& ctx);
bool has_pre_kernels(const Ctx& ctx);
bool has_post_kernels(const Ctx& ctx);
void invert_pre_plain(std::vector<std::uint8_t>& img, unsigned lane_idx, const Ctx& ctx);
void invert_post_plain(std::vector<std::uint8_t>& img, unsigned lane_idx, const Ctx& ctx);

// Rotation by k within each sibling lane set of the clique, identity on
// unused lanes. Applied through the instrumented facade; k % w == 0 is a
// no-op and not counted.
Block64 modulate_lanes(PimMachine& m, const Clique& c, const Block64& b, unsigned k);
Block64 modulate_words(PimMachine& m, const Clique& c, const Block64& b, unsigned k);

// write_burst preserving lanes owned by no group (read-modify-write).
void write_burst_blend(PimMachine& m, const Clique& c, const EntangledGroup& eg,
                       std::uint64_t offset, Block64 b);

void run_staged(PimMachine& m, const Ctx& ctx, const HostBuffers* root_in, HostBuffers* root_out);
void run_streamed(PimMachine& m, const Ctx& ctx, const HostBuffers* root_in,
                  HostBuffers* root_out);

}  // namespace pimcc::detail
