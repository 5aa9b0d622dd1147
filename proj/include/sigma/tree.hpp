#ifndef SIGMA_TREE_HPP_
#define SIGMA_TREE_HPP_

// Binary-word combinatorics of the dyadic tree of height N: vertices are
// binary words, leaves are the words of full length N.  Words are stored
// bit-packed with the first digit in the least significant bit, so cut()
// and sibling() are single shift/xor operations.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sigma {

inline constexpr int kMaxTreeHeight = 30;

struct TreeWord {
  std::uint32_t bits = 0;  // digit j_0 in the least significant bit
  int len = 0;

  friend bool operator==(const TreeWord&, const TreeWord&) = default;
};

inline bool tree_less(const TreeWord& a, const TreeWord& b) {
  if (a.len != b.len) return a.len < b.len;
  return a.bits < b.bits;
}

inline TreeWord make_word(std::uint32_t bits, int len) {
  if (len < 0 || len > kMaxTreeHeight)
    throw std::invalid_argument("tree word length out of range");
  std::uint32_t mask = (len == 0) ? 0u : ((len == 32) ? ~0u : ((1u << len) - 1u));
  return TreeWord{bits & mask, len};
}

inline TreeWord root() { return TreeWord{0, 0}; }

/// Level of a vertex: distance from the leaves, N - |j|.
inline int level(const TreeWord& j, int tree_height) {
  if (j.len > tree_height) throw std::invalid_argument("word longer than tree height");
  return tree_height - j.len;
}

/// Removes the first l digits; cut^0 is the identity.
inline TreeWord cut(const TreeWord& j, int l = 1) {
  if (l < 0 || l > j.len) throw std::domain_error("cut: l exceeds word length");
  return TreeWord{j.bits >> l, j.len - l};
}

/// Nearest neighbor on the same level: the first digit is flipped.
inline TreeWord sibling(const TreeWord& j) {
  if (j.len == 0) throw std::domain_error("sibling of the root is undefined");
  return TreeWord{j.bits ^ 1u, j.len};
}

/// True iff i is an ancestor of j (or equal), i.e. i = cut^l(j).
inline bool is_prefix_ancestor(const TreeWord& i, const TreeWord& j) {
  if (i.len > j.len) return false;
  return (j.bits >> (j.len - i.len)) == i.bits;
}

/// Least common ancestor of two vertices of the same tree.
inline TreeWord meet(const TreeWord& i, const TreeWord& j) {
  TreeWord a = i, b = j;
  if (a.len > b.len) a = cut(a, a.len - b.len);
  if (b.len > a.len) b = cut(b, b.len - a.len);
  while (!(a == b)) {
    a = cut(a);
    b = cut(b);
  }
  return a;
}

/// Hierarchical distance between leaves: min l with cut^l(i) = cut^l(j).
inline int hier_distance(const TreeWord& i, const TreeWord& j) {
  if (i.len != j.len) throw std::domain_error("hierarchical distance needs equal-length words");
  std::uint32_t diff = i.bits ^ j.bits;
  if (diff == 0) return 0;
  // distance to the highest differing digit, counted from the deep end
  int highest = 31 - __builtin_clz(diff);
  return highest + 1;
}

/// All leaves extending i; cardinality 2^{level(i)}.
inline std::vector<TreeWord> block_leaves(const TreeWord& i, int tree_height) {
  int k = level(i, tree_height);
  if (k > 24) throw std::invalid_argument("block_leaves: leaf set too large to materialize");
  std::vector<TreeWord> out;
  out.reserve(std::size_t{1} << k);
  for (std::uint32_t t = 0; t < (std::uint32_t{1} << k); ++t)
    out.push_back(TreeWord{(i.bits << k) | t, tree_height});
  return out;
}

/// Lazy variant for large blocks.
template <class Fn>
inline void for_each_block_leaf(const TreeWord& i, int tree_height, Fn&& fn) {
  int k = level(i, tree_height);
  for (std::uint64_t t = 0; t < (std::uint64_t{1} << k); ++t)
    fn(TreeWord{static_cast<std::uint32_t>((std::uint64_t{i.bits} << k) | t), tree_height});
}

struct Antichain {
  std::vector<TreeWord> members;  // sorted canonical order: (len, bits)
  int ambient_height = 0;

  static Antichain from(std::vector<TreeWord> words, int tree_height) {
    std::sort(words.begin(), words.end(), tree_less);
    words.erase(std::unique(words.begin(), words.end()), words.end());
    return Antichain{std::move(words), tree_height};
  }
};

inline bool is_antichain(const std::vector<TreeWord>& a) {
  for (std::size_t x = 0; x < a.size(); ++x)
    for (std::size_t y = 0; y < a.size(); ++y)
      if (x != y && is_prefix_ancestor(a[x], a[y])) return false;
  return true;
}

/// Maximality test: antichain whose blocks partition the leaf set.
inline bool is_maximal_antichain(const std::vector<TreeWord>& a, int tree_height) {
  if (!is_antichain(a)) return false;
  std::uint64_t covered = 0;
  for (const auto& j : a) {
    if (j.len > tree_height) return false;
    covered += std::uint64_t{1} << level(j, tree_height);
  }
  return covered == (std::uint64_t{1} << tree_height);
}

inline bool is_maximal_antichain(const Antichain& a) {
  return is_maximal_antichain(a.members, a.ambient_height);
}

/// True iff every member of b extends some member of a (a precedes b).
inline bool antichain_precedes(const Antichain& a, const Antichain& b) {
  for (const auto& j : b.members) {
    bool above = false;
    for (const auto& i : a.members)
      if (is_prefix_ancestor(i, j)) { above = true; break; }
    if (!above) return false;
  }
  return true;
}

/// Compatibility of a maximal antichain with a leaf pinning: the pinning
/// must be constant on every block.
template <class PinFn>
inline bool is_compatible(const Antichain& a, PinFn&& pin_at_leaf) {
  if (!is_maximal_antichain(a)) throw std::domain_error("is_compatible: antichain not maximal");
  for (const auto& j : a.members) {
    bool first = true;
    double value = 0;
    bool ok = true;
    for_each_block_leaf(j, a.ambient_height, [&](const TreeWord& leaf) {
      double v = pin_at_leaf(leaf);
      if (first) { value = v; first = false; }
      else if (v != value) ok = false;
    });
    if (!ok) return false;
  }
  return true;
}

/// Smallest maximal antichain containing a leaf set B: B together with the
/// minimal vertices that are not ancestors of any member of B.
inline Antichain minimal_antichain_containing(const std::vector<TreeWord>& leaves,
                                              int tree_height) {
  if (leaves.empty()) throw std::domain_error("minimal_antichain_containing: empty leaf set");
  std::vector<TreeWord> members = leaves;
  for (const auto& b : leaves) {
    if (b.len != tree_height) throw std::domain_error("members of B must be leaves");
    for (int l = 0; l <= tree_height - 1; ++l) {
      TreeWord s = sibling(cut(b, l));
      bool ancestor_of_some = false;
      for (const auto& b2 : leaves)
        if (is_prefix_ancestor(s, b2)) { ancestor_of_some = true; break; }
      if (!ancestor_of_some) members.push_back(s);
    }
  }
  return Antichain::from(std::move(members), tree_height);
}

/// The explicit maximal antichain through two leaves; size N + d(p,q).
inline Antichain pq_antichain(const TreeWord& p, const TreeWord& q) {
  if (p == q) throw std::domain_error("pq_antichain: p == q");
  int n = p.len;
  int d = hier_distance(p, q);
  std::vector<TreeWord> members{p, q};
  for (int l = 0; l <= n - 1; ++l)
    if (l != d - 1) members.push_back(sibling(cut(p, l)));
  for (int l = 0; l <= d - 2; ++l) members.push_back(sibling(cut(q, l)));
  return Antichain::from(std::move(members), n);
}

/// The path from p to q inside pq_antichain(p, q); length 2 for d = 1,
/// otherwise 2d - 2 vertices.
inline std::vector<TreeWord> pq_path(const TreeWord& p, const TreeWord& q) {
  if (p == q) throw std::domain_error("pq_path: p == q");
  int d = hier_distance(p, q);
  if (d == 1) return {p, q};
  int m = 2 * d - 3;
  std::vector<TreeWord> path(static_cast<std::size_t>(m) + 1);
  path[0] = p;
  for (int l = 1; l <= d - 2; ++l) path[l] = sibling(cut(p, l));
  for (int l = d - 1; l <= m - 1; ++l) path[l] = sibling(cut(q, m - l));
  path[m] = q;
  return path;
}

/// Serialization used in reports: digits left to right, "ROOT" for the
/// empty word.
inline std::string word_to_string(const TreeWord& j) {
  if (j.len == 0) return "ROOT";
  std::string s;
  s.reserve(j.len);
  for (int k = 0; k < j.len; ++k) s.push_back(((j.bits >> k) & 1u) ? '1' : '0');
  return s;
}

inline TreeWord word_from_string(const std::string& s) {
  if (s == "ROOT") return root();
  std::uint32_t bits = 0;
  if (s.size() > static_cast<std::size_t>(kMaxTreeHeight))
    throw std::invalid_argument("word string too long");
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s[k] == '1') bits |= (1u << k);
    else if (s[k] != '0') throw std::invalid_argument("word string must be binary");
  }
  return TreeWord{bits, static_cast<int>(s.size())};
}

}  // namespace sigma

#endif  // SIGMA_TREE_HPP_
