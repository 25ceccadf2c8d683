#include "pimcc/oracle.hpp"

#include <cstring>
#include <string>

#include "pimcc/error.hpp"

namespace pimcc {

const char* primitive_name(Primitive p) {
  switch (p) {
    case Primitive::alltoall: return "alltoall";
    case Primitive::reduce_scatter: return "reduce_scatter";
    case Primitive::all_gather: return "all_gather";
    case Primitive::all_reduce: return "all_reduce";
    case Primitive::scatter: return "scatter";
    case Primitive::gather: return "gather";
    case Primitive::reduce: return "reduce";
    case Primitive::broadcast: return "broadcast";
  }
  return "?";
}

static void check_state(const PlainGroupState& st) {
  if (st.members.empty()) raise(Errc::size_mismatch, "group must have at least one member");
  std::size_t n = st.members[0].size();
  for (const auto& m : st.members)
    if (m.size() != n) raise(Errc::size_mismatch, "member arrays must be equal length");
  if (n % 8 != 0) raise(Errc::size_mismatch, "member length must be a multiple of 8");
}

static std::vector<std::uint8_t> fold_all(const PlainGroupState& st, ElementType dtype,
                                          ReduceOp op) {
  std::size_t n = st.members[0].size();
  std::vector<std::uint8_t> acc(st.members[0]);
  for (std::size_t q = 1; q < st.members.size(); ++q)
    reduce_bytes(acc.data(), acc.data(), st.members[q].data(), n, dtype, op);
  return acc;
}

OracleResult oracle_run(Primitive primitive, const PlainGroupState& state, ElementType dtype,
                        ReduceOp op, const std::vector<std::uint8_t>* root_buffer) {
  check_state(state);
  const std::size_t G = state.members.size();
  const std::size_t n = state.members[0].size();
  OracleResult res;
  res.state = state;

  switch (primitive) {
    case Primitive::alltoall: {
      if (n % (8 * G) != 0)
        raise(Errc::size_mismatch, "alltoall needs length divisible by 8 * group size");
      std::size_t slot = n / G;
      for (std::size_t p = 0; p < G; ++p)
        for (std::size_t s = 0; s < G; ++s)
          std::memcpy(res.state.members[p].data() + s * slot,
                      state.members[s].data() + p * slot, slot);
      break;
    }
    case Primitive::reduce_scatter: {
      if (n % (8 * G) != 0)
        raise(Errc::size_mismatch, "reduce_scatter needs length divisible by 8 * group size");
      std::size_t slot = n / G;
      for (std::size_t p = 0; p < G; ++p) {
        auto& out = res.state.members[p];
        out.assign(slot, op == ReduceOp::min ? 0xff : 0x00);
        for (std::size_t q = 0; q < G; ++q)
          reduce_bytes(out.data(), out.data(), state.members[q].data() + p * slot, slot, dtype,
                       op);
      }
      break;
    }
    case Primitive::all_gather: {
      for (std::size_t p = 0; p < G; ++p) {
        auto& out = res.state.members[p];
        out.resize(G * n);
        for (std::size_t q = 0; q < G; ++q)
          std::memcpy(out.data() + q * n, state.members[q].data(), n);
      }
      break;
    }
    case Primitive::all_reduce: {
      auto acc = fold_all(state, dtype, op);
      for (auto& m : res.state.members) m = acc;
      break;
    }
    case Primitive::scatter: {
      if (!root_buffer) raise(Errc::size_mismatch, "scatter needs a root buffer");
      if (root_buffer->size() != G * n)
        raise(Errc::size_mismatch, "scatter root buffer must be group size * member length");
      for (std::size_t p = 0; p < G; ++p)
        std::memcpy(res.state.members[p].data(), root_buffer->data() + p * n, n);
      break;
    }
    case Primitive::gather: {
      res.host_out.resize(G * n);
      for (std::size_t q = 0; q < G; ++q)
        std::memcpy(res.host_out.data() + q * n, state.members[q].data(), n);
      break;
    }
    case Primitive::reduce: {
      res.host_out = fold_all(state, dtype, op);
      break;
    }
    case Primitive::broadcast: {
      if (!root_buffer) raise(Errc::size_mismatch, "broadcast needs a root buffer");
      if (root_buffer->size() != n)
        raise(Errc::size_mismatch, "broadcast root buffer must match member length");
      for (auto& m : res.state.members) m = *root_buffer;
      break;
    }
  }
  return res;
}

}  // namespace pimcc
