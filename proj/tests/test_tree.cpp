#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "sigma/rng.hpp"
#include "sigma/tree.hpp"

using namespace sigma;

namespace {
TreeWord random_leaf(int n, CounterRng& rng) {
  return make_word(static_cast<std::uint32_t>(rng.next_u64()), n);
}
}  // namespace

TEST_CASE("word basics") {
  TreeWord j = word_from_string("0110");
  CHECK(j.len == 4);
  CHECK(word_to_string(j) == "0110");
  CHECK(word_to_string(root()) == "ROOT");
  CHECK(word_from_string("ROOT") == root());
  CHECK_THROWS_AS(word_from_string("01a"), std::invalid_argument);

  CHECK(level(j, 4) == 0);
  CHECK(level(cut(j), 4) == 1);
  CHECK(cut(j, 4) == root());
  CHECK_THROWS_AS(cut(j, 5), std::domain_error);
  CHECK(sibling(j) == word_from_string("1110"));
  CHECK_THROWS_AS(sibling(root()), std::domain_error);
}

TEST_CASE("cut removes the first digit") {
  // "101" has digits j0=1, j1=0, j2=1; cutting drops j0
  CHECK(word_to_string(cut(word_from_string("101"))) == "01");
  CHECK(word_to_string(cut(word_from_string("101"), 2)) == "1");
}

TEST_CASE("ancestry and meet") {
  TreeWord p = word_from_string("0110");
  CHECK(is_prefix_ancestor(cut(p, 2), p));
  CHECK(is_prefix_ancestor(p, p));
  CHECK(!is_prefix_ancestor(sibling(p), p));
  CHECK(meet(p, sibling(p)) == cut(p));
  CHECK(meet(p, p) == p);
  CHECK(meet(word_from_string("0000"), word_from_string("0001")) == root());
}

TEST_CASE("hierarchical distance is an ultrametric") {
  CounterRng rng(11);
  const int n = 8;
  for (int trial = 0; trial < 500; ++trial) {
    TreeWord a = random_leaf(n, rng), b = random_leaf(n, rng), c = random_leaf(n, rng);
    int dab = hier_distance(a, b), dbc = hier_distance(b, c), dac = hier_distance(a, c);
    CHECK(dab == hier_distance(b, a));
    CHECK((dab == 0) == (a == b));
    CHECK(dac <= std::max(dab, dbc));
    // the distance equals the level of the meet
    if (!(a == b)) CHECK(dab == level(meet(a, b), n));
  }
}

TEST_CASE("distance examples") {
  CHECK(hier_distance(word_from_string("0000"), word_from_string("1000")) == 1);
  CHECK(hier_distance(word_from_string("0000"), word_from_string("0100")) == 2);
  CHECK(hier_distance(word_from_string("0000"), word_from_string("0001")) == 4);
}

TEST_CASE("block leaves") {
  TreeWord j = word_from_string("01");
  auto leaves = block_leaves(j, 4);
  REQUIRE(leaves.size() == 4);
  for (const auto& leaf : leaves) {
    CHECK(leaf.len == 4);
    CHECK(is_prefix_ancestor(j, leaf));
  }
  std::vector<TreeWord> lazy;
  for_each_block_leaf(j, 4, [&](const TreeWord& l) { lazy.push_back(l); });
  CHECK(lazy == leaves);
}

TEST_CASE("maximal antichains") {
  const int n = 3;
  Antichain leaves = Antichain::from(block_leaves(root(), n), n);
  CHECK(is_maximal_antichain(leaves));
  CHECK(is_maximal_antichain(Antichain{{root()}, n}));

  std::vector<TreeWord> mixed{word_from_string("000"), word_from_string("100"),
                              word_from_string("10"), word_from_string("1")};
  CHECK(is_maximal_antichain(mixed, n));
  mixed.pop_back();
  CHECK(!is_maximal_antichain(mixed, n));  // leaf "??1" uncovered
  mixed.push_back(word_from_string("000"));
  CHECK(!is_maximal_antichain(mixed, n));

  std::vector<TreeWord> overlap{root(), word_from_string("0")};
  CHECK(!is_antichain(overlap));
}

TEST_CASE("antichain order") {
  const int n = 3;
  Antichain coarse{{root()}, n};
  Antichain leaves = Antichain::from(block_leaves(root(), n), n);
  CHECK(antichain_precedes(coarse, leaves));
  CHECK(!antichain_precedes(leaves, coarse));
  CHECK(antichain_precedes(coarse, coarse));
}

TEST_CASE("pinning compatibility") {
  const int n = 3;
  TreeWord p = word_from_string("000");
  Antichain a = pq_antichain(p, word_from_string("010"));
  auto uniform = [](const TreeWord&) { return 0.5; };
  auto point_at_p = [&](const TreeWord& leaf) { return leaf == p ? 1.0 : 0.0; };
  CHECK(is_compatible(a, uniform));
  CHECK(is_compatible(a, point_at_p));  // p is a singleton block
  Antichain coarse{{root()}, n};
  CHECK(!is_compatible(coarse, point_at_p));
  Antichain not_maximal{{p}, n};
  CHECK_THROWS_AS(is_compatible(not_maximal, uniform), std::domain_error);
}

TEST_CASE("pq antichain has size N + d and contains the pair") {
  CounterRng rng(7);
  for (int n = 1; n <= 6; ++n) {
    for (int trial = 0; trial < 40; ++trial) {
      TreeWord p = random_leaf(n, rng), q = random_leaf(n, rng);
      if (p == q) continue;
      int d = hier_distance(p, q);
      Antichain a = pq_antichain(p, q);
      CHECK(a.members.size() == static_cast<std::size_t>(n + d));
      CHECK(is_maximal_antichain(a));
      CHECK(std::count(a.members.begin(), a.members.end(), p) == 1);
      CHECK(std::count(a.members.begin(), a.members.end(), q) == 1);
    }
  }
}

TEST_CASE("pq antichain is the minimal one containing {p, q}") {
  CounterRng rng(13);
  for (int n = 1; n <= 4; ++n) {
    for (int trial = 0; trial < 30; ++trial) {
      TreeWord p = random_leaf(n, rng), q = random_leaf(n, rng);
      if (p == q) continue;
      Antichain a = pq_antichain(p, q);
      Antichain m = minimal_antichain_containing({p, q}, n);
      CHECK(a.members == m.members);
    }
  }
}

TEST_CASE("pq path") {
  TreeWord p = word_from_string("0000");
  SECTION("d = 1") {
    auto path = pq_path(p, word_from_string("1000"));
    REQUIRE(path.size() == 2);
    CHECK(path.front() == p);
  }
  SECTION("d = 4") {
    TreeWord q = word_from_string("0001");
    auto path = pq_path(p, q);
    REQUIRE(path.size() == 2 * 4 - 2);
    CHECK(path.front() == p);
    CHECK(path.back() == q);
    // every path vertex lies in the antichain, each exactly once
    Antichain a = pq_antichain(p, q);
    std::set<std::string> seen;
    for (const auto& v : path) {
      CHECK(std::count(a.members.begin(), a.members.end(), v) == 1);
      CHECK(seen.insert(word_to_string(v)).second);
    }
  }
  CHECK_THROWS_AS(pq_path(p, p), std::domain_error);
}

TEST_CASE("minimal antichain rejects non-leaves") {
  CHECK_THROWS_AS(minimal_antichain_containing({word_from_string("01")}, 3), std::domain_error);
  CHECK_THROWS_AS(minimal_antichain_containing({}, 3), std::domain_error);
}
