#pragma once

#include <array>
#include <cstdint>

namespace pimcc {

using PeId = std::uint32_t;

// Physical DIMM hierarchy. Chips per rank and banks per chip are fixed at 8;
// the codec's 8x8 transpose and all lane math assume width 8.
struct Topology {
  std::uint32_t channels = 1;
  std::uint32_t ranks_per_channel = 1;

  static constexpr std::uint32_t chips_per_rank = 8;
  static constexpr std::uint32_t banks_per_chip = 8;

  std::uint32_t total_pes() const { return channels * ranks_per_channel * 64; }

  friend bool operator==(const Topology&, const Topology&) = default;
};

Topology make_topology(std::uint32_t channels, std::uint32_t ranks);

struct PeLocation {
  std::uint32_t channel = 0;
  std::uint32_t rank = 0;
  std::uint32_t bank = 0;
  std::uint32_t chip = 0;

  friend bool operator==(const PeLocation&, const PeLocation&) = default;
};

// Canonical linear order: chip fastest, then bank, rank, channel.
PeLocation decompose(const Topology& topo, PeId pe);
PeId compose(const Topology& topo, const PeLocation& loc);

// The 8 PEs sharing (channel, rank, bank), one per chip. A single 64-byte
// burst always touches a whole entangled group.
struct EntangledGroup {
  std::uint32_t id = 0;
  std::array<PeId, 8> members{};
};

constexpr std::uint32_t lane_of(PeId pe) { return pe % 8; }
constexpr std::uint32_t entangled_group_id(PeId pe) { return pe / 8; }

EntangledGroup entangled_group_of(const Topology& topo, PeId pe);
EntangledGroup entangled_group_by_id(const Topology& topo, std::uint32_t id);

}  // namespace pimcc
