#include "pimcc/machine.hpp"

#include <cstring>
#include <string>

#include "pimcc/error.hpp"

namespace pimcc {

CostCounters CostCounters::operator-(const CostCounters& o) const {
  CostCounters d;
  d.bus_bytes = bus_bytes - o.bus_bytes;
  d.dt_blocks = dt_blocks - o.dt_blocks;
  d.host_rot_ops = host_rot_ops - o.host_rot_ops;
  d.host_reduce_ops = host_reduce_ops - o.host_reduce_ops;
  d.host_staged_bytes = host_staged_bytes - o.host_staged_bytes;
  d.pe_moved_bytes = pe_moved_bytes - o.pe_moved_bytes;
  d.kernel_launches = kernel_launches - o.kernel_launches;
  return d;
}

std::string CostCounters::to_json() const {
  std::string s = "{";
  s += "\"bus_bytes\":" + std::to_string(bus_bytes);
  s += ",\"dt_blocks\":" + std::to_string(dt_blocks);
  s += ",\"host_rot_ops\":" + std::to_string(host_rot_ops);
  s += ",\"host_reduce_ops\":" + std::to_string(host_reduce_ops);
  s += ",\"host_staged_bytes\":" + std::to_string(host_staged_bytes);
  s += ",\"pe_moved_bytes\":" + std::to_string(pe_moved_bytes);
  s += ",\"kernel_launches\":" + std::to_string(kernel_launches);
  s += "}";
  return s;
}

PimMachine::PimMachine(const Topology& topo) : topo_(topo), mram_(topo.total_pes()) {}

std::vector<std::uint8_t>& PimMachine::mram(PeId pe) {
  if (pe >= mram_.size()) raise(Errc::out_of_range, "pe " + std::to_string(pe));
  return mram_[pe];
}

const std::vector<std::uint8_t>& PimMachine::mram(PeId pe) const {
  if (pe >= mram_.size()) raise(Errc::out_of_range, "pe " + std::to_string(pe));
  return mram_[pe];
}

void PimMachine::ensure_mram(PeId pe, std::uint64_t size) {
  auto& m = mram(pe);
  if (m.size() < size) m.resize(size, 0);
}

Block64 PimMachine::read_burst(const EntangledGroup& group, std::uint64_t offset) {
  if (offset % 8 != 0) raise(Errc::misaligned, "burst offset must be a multiple of 8");
  Block64 b;
  for (unsigned lane = 0; lane < 8; ++lane) {
    const auto& m = mram(group.members[lane]);
    if (m.size() < offset + 8)
      raise(Errc::short_mram, "pe " + std::to_string(group.members[lane]) +
                                  " mram shorter than offset " + std::to_string(offset + 8));
    for (unsigned beat = 0; beat < 8; ++beat) b.bytes[beat * 8 + lane] = m[offset + beat];
  }
  counters_.bus_bytes += 64;
  return b;
}

void PimMachine::write_burst(const EntangledGroup& group, std::uint64_t offset, const Block64& b) {
  if (offset % 8 != 0) raise(Errc::misaligned, "burst offset must be a multiple of 8");
  for (unsigned lane = 0; lane < 8; ++lane) {
    ensure_mram(group.members[lane], offset + 8);
    auto& m = mram_[group.members[lane]];
    for (unsigned beat = 0; beat < 8; ++beat) m[offset + beat] = b.bytes[beat * 8 + lane];
  }
  counters_.bus_bytes += 64;
}

void PimMachine::pe_kernel_block_rotate(PeId pe, std::uint64_t base, std::uint64_t block_size,
                                        std::uint64_t num_blocks, std::uint64_t rotate_by) {
  if (base % 8 != 0 || block_size % 8 != 0 || block_size < 8)
    raise(Errc::misaligned, "kernel region must be 8-byte aligned blocks");
  if (rotate_by >= num_blocks) raise(Errc::out_of_region, "rotate_by must be < num_blocks");
  auto& m = mram(pe);
  std::uint64_t len = block_size * num_blocks;
  if (m.size() < base + len) raise(Errc::out_of_region, "kernel region beyond mram");
  if (rotate_by != 0) {
    std::vector<std::uint8_t> tmp(m.begin() + base, m.begin() + base + len);
    for (std::uint64_t s = 0; s < num_blocks; ++s) {
      std::uint64_t src = (s + rotate_by) % num_blocks;
      std::memcpy(m.data() + base + s * block_size, tmp.data() + src * block_size, block_size);
    }
  }
  counters_.pe_moved_bytes += len;
  counters_.kernel_launches += 1;
}

void PimMachine::pe_kernel_permute(PeId pe, std::uint64_t base, std::uint64_t block_size,
                                   std::span<const std::uint32_t> perm) {
  if (base % 8 != 0 || block_size % 8 != 0 || block_size < 8)
    raise(Errc::misaligned, "kernel region must be 8-byte aligned blocks");
  std::uint64_t n = perm.size();
  std::vector<bool> seen(n, false);
  for (auto p : perm) {
    if (p >= n || seen[p]) raise(Errc::not_a_permutation, "perm is not a permutation");
    seen[p] = true;
  }
  auto& m = mram(pe);
  std::uint64_t len = block_size * n;
  if (m.size() < base + len) raise(Errc::out_of_region, "kernel region beyond mram");
  std::vector<std::uint8_t> tmp(m.begin() + base, m.begin() + base + len);
  for (std::uint64_t s = 0; s < n; ++s)
    std::memcpy(m.data() + base + s * block_size, tmp.data() + perm[s] * block_size, block_size);
  counters_.pe_moved_bytes += len;
  counters_.kernel_launches += 1;
}

std::uint64_t PimMachine::host_stage(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = next_handle_++;
  staged_.emplace(h, std::vector<std::uint8_t>(bytes.begin(), bytes.end()));
  counters_.host_staged_bytes += bytes.size();
  return h;
}

std::vector<std::uint8_t> PimMachine::host_unstage(std::uint64_t handle) {
  auto it = staged_.find(handle);
  if (it == staged_.end()) raise(Errc::unknown_handle, "handle " + std::to_string(handle));
  auto out = std::move(it->second);
  staged_.erase(it);
  return out;
}

Block64 PimMachine::dt(const Block64& b) {
  counters_.dt_blocks += 1;
  return domain_transfer(b);
}

Block64 PimMachine::rot_word(const Block64& b, unsigned k, unsigned width) {
  counters_.host_rot_ops += 1;
  return pimcc::rot_word(b, k, width);
}

Block64 PimMachine::rot_lane(const Block64& b, unsigned k, unsigned width) {
  counters_.host_rot_ops += 1;
  return pimcc::rot_lane(b, k, width);
}

Block64 PimMachine::permute_words(const Block64& b, const std::array<std::uint8_t, 8>& perm) {
  counters_.host_rot_ops += 1;
  return pimcc::permute_words(b, perm);
}

Block64 PimMachine::permute_lanes(const Block64& b, const std::array<std::uint8_t, 8>& perm) {
  counters_.host_rot_ops += 1;
  return pimcc::permute_lanes(b, perm);
}

Block64 PimMachine::reduce(const Block64& acc, const Block64& b, ElementType dtype, ReduceOp op) {
  counters_.host_reduce_ops += 1;
  return reduce_host_words(acc, b, dtype, op);
}

std::uint64_t PimMachine::fold_words(const Block64& b, std::span<const std::uint8_t> word_idx,
                                     ElementType dtype, ReduceOp op) {
  std::uint64_t acc = identity_word(dtype, op);
  for (auto w : word_idx) {
    if (w >= 8) raise(Errc::out_of_range, "word index");
    acc = reduce_word(acc, b.word(w), dtype, op);
    counters_.host_reduce_ops += 1;
  }
  return acc;
}

}  // namespace pimcc
