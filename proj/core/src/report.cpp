#include <string>

#include "pimcc/collectives.hpp"
#include "pimcc/error.hpp"

namespace pimcc {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::zero_dimension: return "zero_dimension";
    case Errc::out_of_range: return "out_of_range";
    case Errc::bad_shift: return "bad_shift";
    case Errc::bad_length: return "bad_length";
    case Errc::not_power_of_two: return "not_power_of_two";
    case Errc::too_many_nodes: return "too_many_nodes";
    case Errc::empty_dims: return "empty_dims";
    case Errc::bad_node_count: return "bad_node_count";
    case Errc::coord_out_of_range: return "coord_out_of_range";
    case Errc::bad_mask_length: return "bad_mask_length";
    case Errc::bad_mask_char: return "bad_mask_char";
    case Errc::empty_mask: return "empty_mask";
    case Errc::misaligned: return "misaligned";
    case Errc::short_mram: return "short_mram";
    case Errc::out_of_region: return "out_of_region";
    case Errc::not_a_permutation: return "not_a_permutation";
    case Errc::unknown_handle: return "unknown_handle";
    case Errc::constraint_violation: return "constraint_violation";
    case Errc::illegal_flags: return "illegal_flags";
    case Errc::buffer_count_mismatch: return "buffer_count_mismatch";
    case Errc::size_mismatch: return "size_mismatch";
  }
  return "unknown";
}

const char* element_type_name(ElementType t) {
  switch (t) {
    case ElementType::u8: return "u8";
    case ElementType::u16: return "u16";
    case ElementType::u32: return "u32";
    case ElementType::u64: return "u64";
  }
  return "?";
}

std::optional<ElementType> element_type_from_name(const std::string& s) {
  if (s == "u8") return ElementType::u8;
  if (s == "u16") return ElementType::u16;
  if (s == "u32") return ElementType::u32;
  if (s == "u64") return ElementType::u64;
  return std::nullopt;
}

const char* reduce_op_name(ReduceOp op) {
  switch (op) {
    case ReduceOp::sum: return "sum";
    case ReduceOp::min: return "min";
    case ReduceOp::max: return "max";
    case ReduceOp::bit_or: return "bit_or";
  }
  return "?";
}

std::optional<ReduceOp> reduce_op_from_name(const std::string& s) {
  if (s == "sum") return ReduceOp::sum;
  if (s == "min") return ReduceOp::min;
  if (s == "max") return ReduceOp::max;
  if (s == "bit_or") return ReduceOp::bit_or;
  return std::nullopt;
}

const char* flags_name(const TechniqueFlags& f) {
  if (!f.pr && !f.im && !f.cm) return "baseline";
  if (f.pr && !f.im && !f.cm) return "pr";
  if (f.pr && f.im && !f.cm) return "pr+im";
  if (f.pr && f.im && f.cm) return "full";
  return "custom";
}

std::optional<TechniqueFlags> flags_from_name(const std::string& s) {
  if (s == "baseline") return TechniqueFlags{false, false, false};
  if (s == "pr") return TechniqueFlags{true, false, false};
  if (s == "pr+im") return TechniqueFlags{true, true, false};
  if (s == "full" || s == "pr+im+cm") return TechniqueFlags{true, true, true};
  return std::nullopt;
}

static std::string dims_text(const std::vector<std::uint32_t>& dims) {
  std::string s;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) s += 'x';
    s += std::to_string(dims[i]);
  }
  return s;
}

std::string RunReport::to_json() const {
  std::string s = "{";
  s += "\"primitive\":\"" + std::string(primitive_name(primitive)) + "\"";
  s += ",\"dtype\":\"" + std::string(element_type_name(dtype)) + "\"";
  s += ",\"op\":\"" + std::string(reduce_op_name(op)) + "\"";
  s += ",\"dims\":[";
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(dims[i]);
  }
  s += "]";
  s += ",\"mask\":\"" + mask + "\"";
  s += ",\"group_size\":" + std::to_string(group_size);
  s += ",\"groups\":" + std::to_string(groups);
  s += ",\"bytes_per_pe\":" + std::to_string(bytes_per_pe);
  s += ",\"flags\":\"" + std::string(flags_name(flags)) + "\"";
  s += ",\"counters\":" + counters.to_json();
  s += "}";
  return s;
}

std::string RunReport::csv_header() {
  return "primitive,dtype,op,dims,mask,group_size,bytes_per_pe,flags,bus_bytes,dt_blocks,"
         "host_rot_ops,host_reduce_ops,host_staged_bytes,pe_moved_bytes,kernel_launches";
}

std::string RunReport::to_csv_row() const {
  std::string s;
  s += primitive_name(primitive);
  s += ',';
  s += element_type_name(dtype);
  s += ',';
  s += reduce_op_name(op);
  s += ',';
  s += dims_text(dims);
  s += ',';
  s += mask;
  s += ',' + std::to_string(group_size);
  s += ',' + std::to_string(bytes_per_pe);
  s += ',';
  s += flags_name(flags);
  s += ',' + std::to_string(counters.bus_bytes);
  s += ',' + std::to_string(counters.dt_blocks);
  s += ',' + std::to_string(counters.host_rot_ops);
  s += ',' + std::to_string(counters.host_reduce_ops);
  s += ',' + std::to_string(counters.host_staged_bytes);
  s += ',' + std::to_string(counters.pe_moved_bytes);
  s += ',' + std::to_string(counters.kernel_launches);
  return s;
}

}  // namespace pimcc
