#include <cstring>

#include "doctest.h"
#include "pimcc/codec.hpp"
#include "pimcc/error.hpp"
#include "pimcc/rng.hpp"

using namespace pimcc;

namespace {

Block64 random_block(Rng& rng) {
  Block64 b;
  for (auto& x : b.bytes) x = rng.next_byte();
  return b;
}

}  // namespace

TEST_CASE("domain transfer transposes the 8x8 byte matrix") {
  Block64 z;
  CHECK(domain_transfer(z) == z);

  Block64 b;
  for (unsigned beat = 0; beat < 8; ++beat)
    for (unsigned lane = 0; lane < 8; ++lane) b[beat * 8 + lane] = 10 * lane + beat;
  Block64 t = domain_transfer(b);
  for (unsigned lane = 0; lane < 8; ++lane)
    for (unsigned beat = 0; beat < 8; ++beat) CHECK(t[lane * 8 + beat] == 10 * lane + beat);
}

TEST_CASE("domain transfer is an involution") {
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    Block64 b = random_block(rng);
    CHECK(domain_transfer(domain_transfer(b)) == b);
  }
}

TEST_CASE("hex dump round trip") {
  Rng rng(12);
  Block64 b = random_block(rng);
  std::string h = b.hex();
  CHECK(h.size() == 128);
  CHECK(Block64::from_hex(h) == b);
  CHECK_THROWS_AS(Block64::from_hex("abc"), Error);
}

TEST_CASE("rot_word shifts whole words") {
  Rng rng(13);
  Block64 b = random_block(rng);
  CHECK(rot_word(b, 0) == b);
  Block64 r = rot_word(b, 1);
  for (unsigned i = 0; i < 8; ++i) CHECK(r.word(i) == b.word((i + 1) % 8));
  CHECK(rot_word(rot_word(b, 3), 5) == b);
}

TEST_CASE("rotation group: shifts compose mod width") {
  Rng rng(14);
  for (unsigned width : {2u, 4u, 8u}) {
    for (int i = 0; i < 50; ++i) {
      Block64 b = random_block(rng);
      unsigned a = static_cast<unsigned>(rng.below(width));
      unsigned c = static_cast<unsigned>(rng.below(width));
      CHECK(rot_word(rot_word(b, a, width), c, width) == rot_word(b, (a + c) % width, width));
      CHECK(rot_lane(rot_lane(b, a, width), c, width) == rot_lane(b, (a + c) % width, width));
    }
  }
}

TEST_CASE("rot_lane moves lane columns") {
  Block64 b;
  for (unsigned beat = 0; beat < 8; ++beat)
    for (unsigned lane = 0; lane < 8; ++lane) b[beat * 8 + lane] = static_cast<std::uint8_t>(lane);
  Block64 r = rot_lane(b, 2);
  for (unsigned beat = 0; beat < 8; ++beat)
    for (unsigned lane = 0; lane < 8; ++lane) CHECK(r[beat * 8 + lane] == (lane + 2) % 8);
}

TEST_CASE("rotation rejects bad shifts and widths") {
  Block64 b;
  CHECK_THROWS_AS(rot_word(b, 8), Error);
  CHECK_THROWS_AS(rot_lane(b, 2, 2), Error);
  CHECK_THROWS_AS(rot_word(b, 0, 3), Error);
}

// The identity behind cross-domain modulation: a word rotation framed by two
// transposes collapses to a byte-level lane rotation.
TEST_CASE("fusion identity at widths 2, 4, 8") {
  Rng rng(15);
  for (unsigned width : {2u, 4u, 8u}) {
    for (unsigned k = 0; k < width; ++k) {
      for (int i = 0; i < 100; ++i) {
        Block64 b = random_block(rng);
        CHECK(domain_transfer(rot_word(domain_transfer(b), k, width)) == rot_lane(b, k, width));
      }
    }
  }
}

TEST_CASE("permute_words and permute_lanes") {
  Rng rng(16);
  Block64 b = random_block(rng);
  std::array<std::uint8_t, 8> id{0, 1, 2, 3, 4, 5, 6, 7};
  CHECK(permute_words(b, id) == b);
  CHECK(permute_lanes(b, id) == b);
  std::array<std::uint8_t, 8> rev{7, 6, 5, 4, 3, 2, 1, 0};
  Block64 r = permute_words(b, rev);
  for (unsigned i = 0; i < 8; ++i) CHECK(r.word(i) == b.word(7 - i));
  CHECK(permute_words(permute_words(b, rev), rev) == b);
  std::array<std::uint8_t, 8> dup{0, 0, 2, 3, 4, 5, 6, 7};
  CHECK_THROWS_AS(permute_words(b, dup), Error);
}

TEST_CASE("reduce_host_words") {
  Rng rng(17);
  Block64 x = random_block(rng);
  Block64 z;
  CHECK(reduce_host_words(z, x, ElementType::u64, ReduceOp::sum) == x);

  Block64 a, b;
  a.bytes.fill(200);
  b.bytes.fill(100);
  Block64 s = reduce_host_words(a, b, ElementType::u8, ReduceOp::sum);
  for (auto v : s.bytes) CHECK(v == 44);  // (200 + 100) mod 256

  Block64 five, three;
  for (unsigned i = 0; i < 8; ++i) {
    five.set_word(i, 0x0000000500000005ull);
    three.set_word(i, 0x0000000300000003ull);
  }
  CHECK(reduce_host_words(five, three, ElementType::u32, ReduceOp::min) == three);
}

TEST_CASE("u8 sum equals a scalar bytewise loop") {
  Rng rng(18);
  for (int i = 0; i < 200; ++i) {
    Block64 a = random_block(rng), b = random_block(rng);
    Block64 r = reduce_host_words(a, b, ElementType::u8, ReduceOp::sum);
    for (unsigned j = 0; j < 64; ++j)
      CHECK(r[j] == static_cast<std::uint8_t>(a[j] + b[j]));
  }
}

TEST_CASE("identity elements") {
  CHECK(identity_word(ElementType::u32, ReduceOp::sum) == 0);
  CHECK(identity_word(ElementType::u8, ReduceOp::bit_or) == 0);
  CHECK(identity_word(ElementType::u16, ReduceOp::max) == 0);
  CHECK(identity_word(ElementType::u64, ReduceOp::min) == ~0ull);
  Rng rng(19);
  Block64 b = random_block(rng);
  for (auto op : {ReduceOp::sum, ReduceOp::min, ReduceOp::max, ReduceOp::bit_or})
    CHECK(reduce_host_words(identity_block(ElementType::u16, op), b, ElementType::u16, op) == b);
}

TEST_CASE("pack_chunks layout") {
  std::uint64_t seven = 7;
  auto bytes = pack_chunks(std::span(&seven, 1), ElementType::u64);
  std::vector<std::uint8_t> want{7, 0, 0, 0, 0, 0, 0, 0};
  CHECK(bytes == want);

  std::uint64_t u32s[2] = {1, 2};
  auto packed = pack_chunks(std::span(u32s, 2), ElementType::u32);
  REQUIRE(packed.size() == 8);
  CHECK(packed[0] == 1);
  CHECK(packed[4] == 2);
}

TEST_CASE("pack/unpack round trip per dtype") {
  Rng rng(20);
  for (auto dtype : {ElementType::u8, ElementType::u16, ElementType::u32, ElementType::u64}) {
    for (int i = 0; i < 250; ++i) {
      std::size_t n = (1 + rng.below(16)) * 8 / width_bytes(dtype);
      std::vector<std::uint64_t> vals(n);
      std::uint64_t mask =
          width_bytes(dtype) == 8 ? ~0ull : ((1ull << (8 * width_bytes(dtype))) - 1);
      for (auto& v : vals) v = rng.next() & mask;
      auto bytes = pack_chunks(vals, dtype);
      CHECK(unpack_chunks(bytes, dtype) == vals);
    }
  }
}

TEST_CASE("unpack rejects ragged lengths") {
  std::vector<std::uint8_t> bytes(12);
  CHECK_THROWS_AS(unpack_chunks(bytes, ElementType::u32), Error);
}
