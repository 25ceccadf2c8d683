#include "pimcc/topology.hpp"

#include <string>

#include "pimcc/error.hpp"

namespace pimcc {

Topology make_topology(std::uint32_t channels, std::uint32_t ranks) {
  if (channels == 0 || ranks == 0)
    raise(Errc::zero_dimension, "channels and ranks must both be at least 1");
  return Topology{channels, ranks};
}

PeLocation decompose(const Topology& topo, PeId pe) {
  if (pe >= topo.total_pes())
    raise(Errc::out_of_range,
          "pe " + std::to_string(pe) + " >= total_pes " + std::to_string(topo.total_pes()));
  PeLocation loc;
  loc.chip = pe % 8;
  loc.bank = (pe / 8) % 8;
  loc.rank = (pe / 64) % topo.ranks_per_channel;
  loc.channel = pe / (64 * topo.ranks_per_channel);
  return loc;
}

PeId compose(const Topology& topo, const PeLocation& loc) {
  if (loc.chip >= 8 || loc.bank >= 8 || loc.rank >= topo.ranks_per_channel ||
      loc.channel >= topo.channels)
    raise(Errc::out_of_range, "location component out of range");
  return loc.chip + 8 * (loc.bank + 8 * (loc.rank + topo.ranks_per_channel * loc.channel));
}

EntangledGroup entangled_group_of(const Topology& topo, PeId pe) {
  if (pe >= topo.total_pes())
    raise(Errc::out_of_range, "pe " + std::to_string(pe));
  return entangled_group_by_id(topo, pe / 8);
}

EntangledGroup entangled_group_by_id(const Topology& topo, std::uint32_t id) {
  if (id >= topo.total_pes() / 8)
    raise(Errc::out_of_range, "entangled group " + std::to_string(id));
  EntangledGroup g;
  g.id = id;
  for (std::uint32_t lane = 0; lane < 8; ++lane) g.members[lane] = id * 8 + lane;
  return g;
}

}  // namespace pimcc
