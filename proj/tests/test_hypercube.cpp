#include <set>

#include "doctest.h"
#include "pimcc/error.hpp"
#include "pimcc/hypercube.hpp"

using namespace pimcc;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected throw");
  return Errc::out_of_range;
}

}  // namespace

TEST_CASE("hypercube validation") {
  Topology t1 = make_topology(1, 1);
  Topology t44 = make_topology(4, 4);
  std::vector<std::uint32_t> d;

  d = {4, 2, 4};
  CHECK(make_hypercube(d, t1).nodes() == 32);
  d = {8, 128};
  CHECK(make_hypercube(d, t44).nodes() == 1024);
  d = {2, 2};
  CHECK(make_hypercube(d, t1).nodes() == 4);  // 4 divides 8: split-group shape

  d = {3, 2};
  CHECK(code_of([&] { make_hypercube(d, t1); }) == Errc::not_power_of_two);
  d = {8, 128};
  CHECK(code_of([&] { make_hypercube(d, t1); }) == Errc::too_many_nodes);
  d = {};
  CHECK(code_of([&] { make_hypercube(d, t1); }) == Errc::empty_dims);
  d = {2, 3};  // 6 nodes: neither a multiple of 8 nor a divisor of it
  CHECK(code_of([&] { make_hypercube(d, t1); }) == Errc::bad_node_count);
}

TEST_CASE("map_node linearizes dim 0 fastest") {
  Topology t = make_topology(1, 1);
  std::vector<std::uint32_t> d424{4, 2, 4};
  HypercubeConfig hc = make_hypercube(d424, t);
  std::vector<std::uint32_t> c;

  c = {0, 0, 0};
  CHECK(map_node(hc, c) == 0);
  c = {3, 1, 0};
  CHECK(map_node(hc, c) == 7);  // last lane of entangled group 0
  c = {4, 0, 0};
  CHECK_THROWS_AS(map_node(hc, c), Error);

  std::vector<std::uint32_t> d88{8, 8};
  HypercubeConfig hc88 = make_hypercube(d88, t);
  c = {0, 1};
  CHECK(map_node(hc88, c) == 8);
}

TEST_CASE("map_node is a bijection onto the first nodes() PE ids") {
  Topology t = make_topology(1, 1);
  std::vector<std::uint32_t> d{4, 2, 4};
  HypercubeConfig hc = make_hypercube(d, t);
  std::set<PeId> seen;
  for (std::uint32_t z = 0; z < 4; ++z)
    for (std::uint32_t y = 0; y < 2; ++y)
      for (std::uint32_t x = 0; x < 4; ++x) {
        std::vector<std::uint32_t> c{x, y, z};
        PeId pe = map_node(hc, c);
        CHECK(pe < 32);
        seen.insert(pe);
      }
  CHECK(seen.size() == 32);
}

TEST_CASE("mask parsing") {
  Topology t = make_topology(1, 1);
  std::vector<std::uint32_t> d{4, 2, 4};
  HypercubeConfig hc = make_hypercube(d, t);
  DimMask m = parse_mask("010", hc);
  CHECK(m.bits == std::vector<bool>{false, true, false});
  CHECK(m.text() == "010");
  CHECK(parse_mask("111", hc).bits == std::vector<bool>{true, true, true});

  CHECK(code_of([&] { parse_mask("000", hc); }) == Errc::empty_mask);
  CHECK(code_of([&] { parse_mask("01", hc); }) == Errc::bad_mask_length);
  CHECK(code_of([&] { parse_mask("0x0", hc); }) == Errc::bad_mask_char);
}

TEST_CASE("slice_groups shapes") {
  Topology t = make_topology(1, 1);
  std::vector<std::uint32_t> d{4, 2, 4};
  HypercubeConfig hc = make_hypercube(d, t);

  auto g100 = slice_groups(hc, parse_mask("100", hc));
  CHECK(g100.size() == 8);
  for (const auto& g : g100) CHECK(g.members.size() == 4);

  auto g101 = slice_groups(hc, parse_mask("101", hc));
  CHECK(g101.size() == 2);
  for (const auto& g : g101) CHECK(g.members.size() == 16);
  CHECK(group_size(hc, parse_mask("101", hc)) == 16);

  std::vector<std::uint32_t> d8{8};
  HypercubeConfig hc8 = make_hypercube(d8, t);
  auto g1 = slice_groups(hc8, parse_mask("1", hc8));
  REQUIRE(g1.size() == 1);
  CHECK(g1[0].members.size() == 8);
}

TEST_CASE("group member order: first selected dim fastest") {
  Topology t = make_topology(1, 1);
  std::vector<std::uint32_t> d{2, 2, 2};
  HypercubeConfig hc = make_hypercube(d, t);
  // mask 101 on [2,2,2]: members iterate x then z, y fixed; lanes interleave
  auto groups = slice_groups(hc, parse_mask("101", hc));
  REQUIRE(groups.size() == 2);
  CHECK(groups[0].members == std::vector<PeId>{0, 1, 4, 5});
  CHECK(groups[1].members == std::vector<PeId>{2, 3, 6, 7});
}

TEST_CASE("groups partition the node set for every mask") {
  Topology t = make_topology(1, 1);
  std::vector<std::vector<std::uint32_t>> shapes{{4, 2, 4}, {8, 8}, {2, 2}, {16}, {8, 2}};
  for (const auto& dims : shapes) {
    HypercubeConfig hc = make_hypercube(dims, t);
    for (std::uint32_t bits = 1; bits < (1u << dims.size()); ++bits) {
      std::string mask;
      for (std::size_t i = 0; i < dims.size(); ++i) mask += (bits >> i & 1) ? '1' : '0';
      auto groups = slice_groups(hc, parse_mask(mask, hc));
      std::set<PeId> seen;
      std::size_t expect_size = group_size(hc, parse_mask(mask, hc));
      for (const auto& g : groups) {
        CHECK(g.members.size() == expect_size);
        for (PeId pe : g.members) CHECK(seen.insert(pe).second);
      }
      CHECK(seen.size() == hc.nodes());
      // determinism
      auto again = slice_groups(hc, parse_mask(mask, hc));
      REQUIRE(again.size() == groups.size());
      for (std::size_t i = 0; i < groups.size(); ++i)
        CHECK(again[i].members == groups[i].members);
    }
  }
}

TEST_CASE("selected x-axis of width 8 keeps whole entangled groups together") {
  Topology t = make_topology(1, 1);
  std::vector<std::uint32_t> d{8, 8};
  HypercubeConfig hc = make_hypercube(d, t);
  for (const char* mask : {"10", "11"}) {
    for (const auto& g : slice_groups(hc, parse_mask(mask, hc))) {
      REQUIRE(g.members.size() % 8 == 0);
      for (std::size_t i = 0; i < g.members.size(); i += 8) {
        CHECK(g.members[i] % 8 == 0);
        for (unsigned l = 1; l < 8; ++l) CHECK(g.members[i + l] == g.members[i] + l);
      }
    }
  }
}
