#pragma once

#include <stdexcept>
#include <string>

namespace pimcc {

enum class Errc {
  zero_dimension,
  out_of_range,
  bad_shift,
  bad_length,
  not_power_of_two,
  too_many_nodes,
  empty_dims,
  bad_node_count,
  coord_out_of_range,
  bad_mask_length,
  bad_mask_char,
  empty_mask,
  misaligned,
  short_mram,
  out_of_region,
  not_a_permutation,
  unknown_handle,
  constraint_violation,
  illegal_flags,
  buffer_count_mismatch,
  size_mismatch,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& msg) { throw Error(code, msg); }

}  // namespace pimcc
