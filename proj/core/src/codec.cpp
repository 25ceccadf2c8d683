#include "pimcc/codec.hpp"

#include <cstring>

#include "pimcc/error.hpp"

namespace pimcc {

std::uint64_t Block64::word(unsigned i) const {
  std::uint64_t v;
  std::memcpy(&v, bytes.data() + i * 8, 8);
  return v;
}

void Block64::set_word(unsigned i, std::uint64_t v) {
  std::memcpy(bytes.data() + i * 8, &v, 8);
}

std::string Block64::hex() const {
  static const char* digits = "0123456789abcdef";
  std::string s;
  s.reserve(128);
  for (auto b : bytes) {
    s += digits[b >> 4];
    s += digits[b & 0xf];
  }
  return s;
}

Block64 Block64::from_hex(const std::string& s) {
  if (s.size() != 128) raise(Errc::bad_length, "block hex dump must be 128 chars");
  auto nib = [](char c) -> unsigned {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    raise(Errc::bad_length, "invalid hex digit");
  };
  Block64 b;
  for (unsigned i = 0; i < 64; ++i)
    b.bytes[i] = static_cast<std::uint8_t>((nib(s[2 * i]) << 4) | nib(s[2 * i + 1]));
  return b;
}

Block64 domain_transfer(const Block64& in) {
  Block64 out;
  for (unsigned beat = 0; beat < 8; ++beat)
    for (unsigned lane = 0; lane < 8; ++lane)
      out.bytes[lane * 8 + beat] = in.bytes[beat * 8 + lane];
  return out;
}

static void check_shift(unsigned k, unsigned width) {
  if (width != 2 && width != 4 && width != 8)
    raise(Errc::bad_shift, "width must be 2, 4 or 8");
  if (k >= width) raise(Errc::bad_shift, "shift k must be < width");
}

Block64 rot_word(const Block64& in, unsigned k, unsigned width) {
  check_shift(k, width);
  Block64 out;
  for (unsigned i = 0; i < 8; ++i) {
    unsigned base = i - i % width;
    unsigned src = base + (i % width + k) % width;
    out.set_word(i, in.word(src));
  }
  return out;
}

Block64 rot_lane(const Block64& in, unsigned k, unsigned width) {
  check_shift(k, width);
  Block64 out;
  for (unsigned beat = 0; beat < 8; ++beat)
    for (unsigned i = 0; i < 8; ++i) {
      unsigned base = i - i % width;
      unsigned src = base + (i % width + k) % width;
      out.bytes[beat * 8 + i] = in.bytes[beat * 8 + src];
    }
  return out;
}

static void check_perm(const std::array<std::uint8_t, 8>& perm) {
  unsigned seen = 0;
  for (auto p : perm) {
    if (p >= 8) raise(Errc::not_a_permutation, "index out of range");
    seen |= 1u << p;
  }
  if (seen != 0xff) raise(Errc::not_a_permutation, "indices not a permutation of 0..7");
}

Block64 permute_words(const Block64& in, const std::array<std::uint8_t, 8>& perm) {
  check_perm(perm);
  Block64 out;
  for (unsigned i = 0; i < 8; ++i) out.set_word(i, in.word(perm[i]));
  return out;
}

Block64 permute_lanes(const Block64& in, const std::array<std::uint8_t, 8>& perm) {
  check_perm(perm);
  Block64 out;
  for (unsigned beat = 0; beat < 8; ++beat)
    for (unsigned i = 0; i < 8; ++i) out.bytes[beat * 8 + i] = in.bytes[beat * 8 + perm[i]];
  return out;
}

template <typename T>
static T reduce_elem(T a, T b, ReduceOp op) {
  switch (op) {
    case ReduceOp::sum: return static_cast<T>(a + b);
    case ReduceOp::min: return a < b ? a : b;
    case ReduceOp::max: return a > b ? a : b;
    case ReduceOp::bit_or: return static_cast<T>(a | b);
  }
  return a;
}

template <typename T>
static void reduce_buf(std::uint8_t* out, const std::uint8_t* a, const std::uint8_t* b,
                       std::size_t n_bytes, ReduceOp op) {
  for (std::size_t i = 0; i < n_bytes; i += sizeof(T)) {
    T x, y;
    std::memcpy(&x, a + i, sizeof(T));
    std::memcpy(&y, b + i, sizeof(T));
    T r = reduce_elem(x, y, op);
    std::memcpy(out + i, &r, sizeof(T));
  }
}

void reduce_bytes(std::uint8_t* out, const std::uint8_t* a, const std::uint8_t* b,
                  std::size_t n_bytes, ElementType dtype, ReduceOp op) {
  switch (dtype) {
    case ElementType::u8: reduce_buf<std::uint8_t>(out, a, b, n_bytes, op); break;
    case ElementType::u16: reduce_buf<std::uint16_t>(out, a, b, n_bytes, op); break;
    case ElementType::u32: reduce_buf<std::uint32_t>(out, a, b, n_bytes, op); break;
    case ElementType::u64: reduce_buf<std::uint64_t>(out, a, b, n_bytes, op); break;
  }
}

Block64 reduce_host_words(const Block64& acc, const Block64& b, ElementType dtype, ReduceOp op) {
  Block64 out;
  reduce_bytes(out.bytes.data(), acc.bytes.data(), b.bytes.data(), 64, dtype, op);
  return out;
}

std::uint64_t reduce_word(std::uint64_t a, std::uint64_t b, ElementType dtype, ReduceOp op) {
  std::uint64_t r;
  reduce_bytes(reinterpret_cast<std::uint8_t*>(&r), reinterpret_cast<const std::uint8_t*>(&a),
               reinterpret_cast<const std::uint8_t*>(&b), 8, dtype, op);
  return r;
}

std::uint64_t identity_word(ElementType dtype, ReduceOp op) {
  return op == ReduceOp::min ? ~0ULL : 0ULL;
}

Block64 identity_block(ElementType dtype, ReduceOp op) {
  Block64 b;
  std::uint8_t fill = op == ReduceOp::min ? 0xff : 0x00;
  b.bytes.fill(fill);
  return b;
}

std::vector<std::uint8_t> pack_chunks(std::span<const std::uint64_t> values, ElementType dtype) {
  unsigned w = width_bytes(dtype);
  if ((values.size() * w) % 8 != 0)
    raise(Errc::bad_length, "packed byte length must be a multiple of 8");
  std::vector<std::uint8_t> out(values.size() * w);
  for (std::size_t i = 0; i < values.size(); ++i)
    for (unsigned b = 0; b < w; ++b)
      out[i * w + b] = static_cast<std::uint8_t>(values[i] >> (8 * b));
  return out;
}

std::vector<std::uint64_t> unpack_chunks(std::span<const std::uint8_t> bytes, ElementType dtype) {
  unsigned w = width_bytes(dtype);
  if (bytes.size() % 8 != 0) raise(Errc::bad_length, "byte length must be a multiple of 8");
  std::vector<std::uint64_t> out(bytes.size() / w);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint64_t v = 0;
    for (unsigned b = 0; b < w; ++b) v |= std::uint64_t(bytes[i * w + b]) << (8 * b);
    out[i] = v;
  }
  return out;
}

}  // namespace pimcc
