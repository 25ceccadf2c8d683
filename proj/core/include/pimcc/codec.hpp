#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pimcc {

// One 64-byte DDR burst. PIM-domain layout: bytes[beat*8 + lane] is byte
// `beat` of lane (chip) `lane`'s 8-byte word. Host-domain layout: word i is
// bytes [i*8, i*8+8).
struct Block64 {
  std::array<std::uint8_t, 64> bytes{};

  std::uint8_t& operator[](std::size_t i) { return bytes[i]; }
  std::uint8_t operator[](std::size_t i) const { return bytes[i]; }

  std::uint64_t word(unsigned i) const;
  void set_word(unsigned i, std::uint64_t v);

  std::string hex() const;                  // 128 hex chars
  static Block64 from_hex(const std::string& s);

  friend bool operator==(const Block64&, const Block64&) = default;
};

enum class ElementType : std::uint8_t { u8, u16, u32, u64 };

constexpr unsigned width_bytes(ElementType t) {
  switch (t) {
    case ElementType::u8: return 1;
    case ElementType::u16: return 2;
    case ElementType::u32: return 4;
    case ElementType::u64: return 8;
  }
  return 0;
}

enum class ReduceOp : std::uint8_t { sum, min, max, bit_or };

const char* element_type_name(ElementType t);
std::optional<ElementType> element_type_from_name(const std::string& s);
const char* reduce_op_name(ReduceOp op);
std::optional<ReduceOp> reduce_op_from_name(const std::string& s);

// 8x8 byte transpose between the PIM and host domains. Involution.
Block64 domain_transfer(const Block64& b);

// Host-domain rotation: out word i == in word (i + k) mod width, applied
// within each aligned run of `width` words. width in {2,4,8}, k < width.
Block64 rot_word(const Block64& b, unsigned k, unsigned width = 8);

// PIM-domain rotation: for every beat j, out[j*8+i] == in[j*8 + ((i+k) mod
// width within the aligned run)]. Satisfies the fusion identity
// domain_transfer(rot_word(domain_transfer(x), k, w)) == rot_lane(x, k, w).
Block64 rot_lane(const Block64& b, unsigned k, unsigned width = 8);

// General forms used when a communication group's lanes are not a contiguous
// aligned run. out word/lane i == in word/lane perm[i].
Block64 permute_words(const Block64& b, const std::array<std::uint8_t, 8>& perm);
Block64 permute_lanes(const Block64& b, const std::array<std::uint8_t, 8>& perm);

// Element-wise reduction of two host-domain blocks. Sum wraps at element
// width.
Block64 reduce_host_words(const Block64& acc, const Block64& b, ElementType dtype, ReduceOp op);

// Reduction of two 8-byte host-domain words.
std::uint64_t reduce_word(std::uint64_t a, std::uint64_t b, ElementType dtype, ReduceOp op);

// Element-wise reduction over raw byte buffers. n_bytes must be a multiple
// of the element width; out may alias a or b.
void reduce_bytes(std::uint8_t* out, const std::uint8_t* a, const std::uint8_t* b,
                  std::size_t n_bytes, ElementType dtype, ReduceOp op);

// Identity element of (dtype, op): 0 for sum/bit_or/max, all-ones for min.
std::uint64_t identity_word(ElementType dtype, ReduceOp op);
Block64 identity_block(ElementType dtype, ReduceOp op);

// Element values <-> bytes. Little-endian per element, elements consecutive
// within each 64-bit chunk; total byte length must be a multiple of 8.
std::vector<std::uint8_t> pack_chunks(std::span<const std::uint64_t> values, ElementType dtype);
std::vector<std::uint64_t> unpack_chunks(std::span<const std::uint8_t> bytes, ElementType dtype);

}  // namespace pimcc
