#pragma once

#include <cstdint>
#include <vector>

#include "pimcc/codec.hpp"

namespace pimcc {

enum class Primitive : std::uint8_t {
  alltoall,
  reduce_scatter,
  all_gather,
  all_reduce,
  scatter,
  gather,
  reduce,
  broadcast,
};

const char* primitive_name(Primitive p);

// Plain per-member byte arrays in group member order; the brute-force
// reference semantics are defined on these, independent of the machine and
// the pipelines.
struct PlainGroupState {
  std::vector<std::vector<std::uint8_t>> members;
};

struct OracleResult {
  PlainGroupState state;                // member arrays after the primitive
  std::vector<std::uint8_t> host_out;   // gather/reduce output, else empty
};

OracleResult oracle_run(Primitive primitive, const PlainGroupState& state, ElementType dtype,
                        ReduceOp op, const std::vector<std::uint8_t>* root_buffer = nullptr);

}  // namespace pimcc
