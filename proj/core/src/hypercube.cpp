#include "pimcc/hypercube.hpp"

#include <string>

#include "pimcc/error.hpp"

namespace pimcc {

static bool is_pow2(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

HypercubeConfig make_hypercube(std::span<const std::uint32_t> dims, const Topology& topo) {
  if (dims.empty()) raise(Errc::empty_dims, "hypercube needs at least one dimension");
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (dims[i] == 0) raise(Errc::zero_dimension, "dims[" + std::to_string(i) + "] is 0");
    if (i + 1 < dims.size() && !is_pow2(dims[i]))
      raise(Errc::not_power_of_two,
            "dims[" + std::to_string(i) + "] = " + std::to_string(dims[i]) +
                " (all but the last dimension must be powers of two)");
  }
  HypercubeConfig hc;
  hc.dims.assign(dims.begin(), dims.end());
  std::uint64_t n = hc.nodes();
  if (n > topo.total_pes())
    raise(Errc::too_many_nodes, std::to_string(n) + " nodes exceed " +
                                    std::to_string(topo.total_pes()) + " PEs");
  if (n % 8 != 0 && 8 % n != 0)
    raise(Errc::bad_node_count,
          "node count " + std::to_string(n) +
              " must be a multiple of 8, or divide 8 (split entangled group)");
  return hc;
}

PeId map_node(const HypercubeConfig& hc, std::span<const std::uint32_t> coords) {
  if (coords.size() != hc.dims.size())
    raise(Errc::coord_out_of_range, "coordinate count mismatch");
  std::uint64_t linear = 0;
  for (std::size_t i = hc.dims.size(); i-- > 0;) {
    if (coords[i] >= hc.dims[i])
      raise(Errc::coord_out_of_range, "coords[" + std::to_string(i) + "] = " +
                                          std::to_string(coords[i]) + " >= " +
                                          std::to_string(hc.dims[i]));
    linear = linear * hc.dims[i] + coords[i];
  }
  return static_cast<PeId>(linear);
}

DimMask parse_mask(const std::string& s, const HypercubeConfig& hc) {
  if (s.size() != hc.dims.size())
    raise(Errc::bad_mask_length, "mask \"" + s + "\" must have one char per dimension (" +
                                     std::to_string(hc.dims.size()) + ")");
  DimMask mask;
  bool any = false;
  for (char c : s) {
    if (c != '0' && c != '1') raise(Errc::bad_mask_char, "mask chars must be '0' or '1'");
    mask.bits.push_back(c == '1');
    any |= c == '1';
  }
  if (!any) raise(Errc::empty_mask, "mask must select at least one dimension");
  return mask;
}

std::uint64_t group_size(const HypercubeConfig& hc, const DimMask& mask) {
  std::uint64_t g = 1;
  for (std::size_t i = 0; i < hc.dims.size(); ++i)
    if (mask.bits[i]) g *= hc.dims[i];
  return g;
}

std::vector<CommGroup> slice_groups(const HypercubeConfig& hc, const DimMask& mask) {
  const std::size_t n = hc.dims.size();
  std::vector<std::uint64_t> strides(n);
  std::uint64_t s = 1;
  for (std::size_t i = 0; i < n; ++i) {
    strides[i] = s;
    s *= hc.dims[i];
  }
  std::vector<std::size_t> sel, unsel;
  for (std::size_t i = 0; i < n; ++i) (mask.bits[i] ? sel : unsel).push_back(i);

  std::uint64_t n_groups = 1;
  for (auto i : unsel) n_groups *= hc.dims[i];
  std::uint64_t g_size = group_size(hc, mask);

  std::vector<CommGroup> groups;
  groups.reserve(n_groups);
  for (std::uint64_t g = 0; g < n_groups; ++g) {
    // Base linear id from the unselected coordinates of this instance.
    std::uint64_t base = 0, rest = g;
    for (auto i : unsel) {
      base += (rest % hc.dims[i]) * strides[i];
      rest /= hc.dims[i];
    }
    CommGroup cg;
    cg.members.reserve(g_size);
    for (std::uint64_t m = 0; m < g_size; ++m) {
      std::uint64_t linear = base, r = m;
      for (auto i : sel) {
        linear += (r % hc.dims[i]) * strides[i];
        r /= hc.dims[i];
      }
      cg.members.push_back(static_cast<PeId>(linear));
    }
    groups.push_back(std::move(cg));
  }
  return groups;
}

}  // namespace pimcc
