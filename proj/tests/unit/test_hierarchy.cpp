#include <doctest.h>

#include <random>
#include <set>

#include "generators.hpp"
#include "hcot/hierarchy.hpp"

using namespace hcot;

TEST_CASE("shipped CIFAR-100 hierarchy has 20 groups of five") {
  const auto h = load_hierarchy(std::string(HCOT_SOURCE_DIR) + "/data/cifar100.hierarchy");
  CHECK(h.num_fine() == 100);
  CHECK(h.num_coarse() == 20);
  for (Index c = 0; c < 20; ++c) CHECK(h.members(c).size() == 5);
  // Spot-check against the official grouping.
  CHECK(h.coarse_of(0) == 4);    // apple -> fruit_and_vegetables
  CHECK(h.coarse_of(4) == 0);    // beaver -> aquatic_mammals
  CHECK(h.coarse_of(99) == 13);  // worm -> non-insect_invertebrates

  const auto s = h.slices_for(17);
  CHECK(s.inner.size() == 4);
  CHECK(s.outer.size() == 95);
}

TEST_CASE("flat and identity hierarchies parse from text") {
  const auto flat = parse_hierarchy("0 0\n1 0\n2 0\n3 0\n");
  CHECK(flat.num_coarse() == 1);
  CHECK(flat == LabelHierarchy::flat(4));
  CHECK(flat.coarse_of(2) == 0);

  const auto ident = parse_hierarchy("# identity\n0 0\n1 1\n\n2 2\n3 3  # trailing comment\n");
  CHECK(ident.num_coarse() == 4);
  CHECK(ident == LabelHierarchy::identity(4));
  for (Index c = 0; c < 4; ++c) CHECK(ident.members(c).size() == 1);
  CHECK(LabelHierarchy::identity(10).coarse_of(7) == 7);
  CHECK(LabelHierarchy::flat(100).coarse_of(42) == 0);
}

TEST_CASE("slices_for degenerate hierarchies") {
  const Index k = 7;
  const auto flat = LabelHierarchy::flat(k);
  const auto ident = LabelHierarchy::identity(k);
  for (Index g = 0; g < k; ++g) {
    const auto sf = flat.slices_for(g);
    CHECK(sf.inner.size() == k - 1);
    CHECK(sf.outer.empty());
    const auto si = ident.slices_for(g);
    CHECK(si.inner.empty());
    CHECK(si.outer.size() == k - 1);
  }
  CHECK_THROWS_AS(flat.slices_for(k), std::out_of_range);
  CHECK_THROWS_AS(flat.coarse_of(k), std::out_of_range);
}

TEST_CASE("parse errors carry line numbers") {
  auto line_of = [](const char* text) -> std::size_t {
    try {
      parse_hierarchy(text);
    } catch (const HierarchyParseError& e) {
      return e.line();
    }
    return 999;
  };
  CHECK(line_of("0 0\n1 0\n1 1\n") == 3);          // duplicate fine index
  CHECK(line_of("0 0\n5 0\n") == 2);               // fine index out of range
  CHECK(line_of("# only comments\n\n") == 0);      // empty
  CHECK(line_of("") == 0);
  CHECK(line_of("0 0\n1 2\n2 2\n") == 2);          // coarse 1 missing
  CHECK(line_of("0 0 0\n") == 1);                  // three levels
  CHECK(line_of("0\n") == 1);
  CHECK(line_of("0 x\n") == 1);
  CHECK(line_of("-1 0\n") == 1);
}

TEST_CASE("contiguous grouping") {
  const auto h = LabelHierarchy::contiguous(9, 3);
  CHECK(h.num_coarse() == 3);
  CHECK(h.coarse_of(4) == 1);
  CHECK(LabelHierarchy::contiguous(9, 1) == LabelHierarchy::flat(9));
  CHECK(LabelHierarchy::contiguous(9, 9) == LabelHierarchy::identity(9));
  CHECK_THROWS_AS(LabelHierarchy::contiguous(9, 2), std::invalid_argument);
}

TEST_CASE("property: slices partition the label set and serialization round-trips") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const Index k = gen::uniform(rng, 1, 40);
    const auto h = gen::random_hierarchy(rng, k);
    CHECK(parse_hierarchy(serialize_hierarchy(h)) == h);

    // members and fine_to_coarse are inverse maps
    Index total = 0;
    for (Index c = 0; c < h.num_coarse(); ++c) {
      REQUIRE(!h.members(c).empty());
      for (Index f : h.members(c)) CHECK(h.coarse_of(f) == c);
      total += h.members(c).size();
    }
    CHECK(total == k);

    for (Index g = 0; g < k; ++g) {
      const auto s = h.slices_for(g);
      std::multiset<Index> all(s.inner.begin(), s.inner.end());
      all.insert(s.outer.begin(), s.outer.end());
      all.insert(g);
      REQUIRE(all.size() == k);
      Index expect = 0;
      for (Index v : all) CHECK(v == expect++);
      for (Index j : s.inner) CHECK(h.coarse_of(j) == h.coarse_of(g));
      for (Index j : s.outer) CHECK(h.coarse_of(j) != h.coarse_of(g));
    }
  }
}
