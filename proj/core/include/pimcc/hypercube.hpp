#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pimcc/topology.hpp"

namespace pimcc {

// User-facing n-dimensional arrangement of PEs. dims[0] is the x-axis and
// varies fastest in the node linearization. All dims except the last must be
// powers of two; the node count must be a multiple of 8 or divide 8.
struct HypercubeConfig {
  std::vector<std::uint32_t> dims;

  std::uint64_t nodes() const {
    std::uint64_t n = 1;
    for (auto d : dims) n *= d;
    return n;
  }
};

HypercubeConfig make_hypercube(std::span<const std::uint32_t> dims, const Topology& topo);

// Bitmap over dimensions; character i of the textual form selects dims[i].
struct DimMask {
  std::vector<bool> bits;

  std::string text() const {
    std::string s;
    for (bool b : bits) s += b ? '1' : '0';
    return s;
  }
};

DimMask parse_mask(const std::string& s, const HypercubeConfig& hc);

// One communication-group instance; members in selected-dims linearization
// order (first selected dim fastest).
struct CommGroup {
  std::vector<PeId> members;
};

PeId map_node(const HypercubeConfig& hc, std::span<const std::uint32_t> coords);

std::vector<CommGroup> slice_groups(const HypercubeConfig& hc, const DimMask& mask);

std::uint64_t group_size(const HypercubeConfig& hc, const DimMask& mask);

}  // namespace pimcc
