#ifndef SALSA_TREE_H_
#define SALSA_TREE_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace salsa {

// One syntactic word of a parsed sentence. Ids are 1-based; head 0 marks the
// root.
struct Token {
  int id = 0;
  std::string form;
  std::string lemma;
  std::string upos;
  int head = 0;
  std::string deprel;

  friend bool operator==(const Token&, const Token&) = default;
};

// A dependency tree over one sentence. Comments hold the raw text of the
// CoNLL-U "#" lines (without the leading '#') in their original order.
struct DepTree {
  std::vector<Token> tokens;
  std::string sentence_id;
  std::vector<std::string> comments;

  std::size_t size() const { return tokens.size(); }
  const Token& at(int id) const { return tokens.at(static_cast<std::size_t>(id - 1)); }
  std::vector<int> heads() const;
  std::vector<std::string> deprels() const;
  int root() const;

  // Value of a "key = value" comment, if present.
  std::optional<std::string> meta(std::string_view key) const;

  friend bool operator==(const DepTree&, const DepTree&) = default;
};

class TreeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Returns a description of the first violated invariant, or nothing when the
// head vector (heads[i] is the head of token i+1) forms a rooted tree.
std::optional<std::string> head_vector_error(std::span<const int> heads);

std::optional<std::string> validation_error(const DepTree& tree);
inline bool is_valid(const DepTree& tree) { return !validation_error(tree); }

// Builds placeholder tokens ("w1".."wn") over a head vector.
DepTree tree_from_heads(std::span<const int> heads);

// Children lists indexed by id; index 0 holds the root.
std::vector<std::vector<int>> children_of(const DepTree& tree);

// Arc (head, dependent); root arcs use head 0.
struct Arc {
  int head = 0;
  int dependent = 0;
  friend bool operator==(const Arc&, const Arc&) = default;
};

bool is_projective(const DepTree& tree);

// First pair of crossing arcs in (dependent, dependent) order, if any.
std::optional<std::pair<Arc, Arc>> find_crossing_arcs(const DepTree& tree);

// Uniform over labeled rooted trees on n nodes (Pruefer sequence plus a
// uniformly chosen root). Deterministic per (n, seed).
DepTree random_tree(int n, std::uint64_t seed);

// Projective tree by recursive random interval splitting.
DepTree random_projective_tree(int n, std::uint64_t seed);

}  // namespace salsa

#endif  // SALSA_TREE_H_
