#include "salsa/tree.h"

#include <algorithm>
#include <array>
#include <queue>
#include <random>

namespace salsa {

std::vector<int> DepTree::heads() const {
  std::vector<int> out;
  out.reserve(tokens.size());
  for (const Token& t : tokens) out.push_back(t.head);
  return out;
}

std::vector<std::string> DepTree::deprels() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const Token& t : tokens) out.push_back(t.deprel);
  return out;
}

int DepTree::root() const {
  for (const Token& t : tokens) {
    if (t.head == 0) return t.id;
  }
  return 0;
}

std::optional<std::string> DepTree::meta(std::string_view key) const {
  for (const std::string& c : comments) {
    std::string_view line(c);
    while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
    if (line.substr(0, key.size()) != key) continue;
    line.remove_prefix(key.size());
    while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
    if (line.empty() || line.front() != '=') continue;
    line.remove_prefix(1);
    while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
    return std::string(line);
  }
  return std::nullopt;
}

std::optional<std::string> head_vector_error(std::span<const int> heads) {
  const int n = static_cast<int>(heads.size());
  if (n == 0) return "empty sentence";
  int roots = 0;
  for (int i = 1; i <= n; ++i) {
    const int h = heads[i - 1];
    if (h < 0 || h > n) {
      return "head out of range: token " + std::to_string(i) + " has head " + std::to_string(h);
    }
    if (h == i) return "token " + std::to_string(i) + " is its own head";
    if (h == 0) ++roots;
  }
  if (roots == 0) return "no root";
  if (roots > 1) return "multiple roots (" + std::to_string(roots) + ")";

  // 0 = unseen, 1 = on the current chain, 2 = known to reach the root.
  std::vector<std::uint8_t> state(static_cast<std::size_t>(n + 1), 0);
  state[0] = 2;
  std::vector<int> chain;
  for (int start = 1; start <= n; ++start) {
    chain.clear();
    int cur = start;
    while (state[cur] == 0) {
      state[cur] = 1;
      chain.push_back(cur);
      cur = heads[cur - 1];
    }
    if (state[cur] == 1) return "cycle through token " + std::to_string(cur);
    for (int c : chain) state[c] = 2;
  }
  return std::nullopt;
}

std::optional<std::string> validation_error(const DepTree& tree) {
  for (std::size_t i = 0; i < tree.tokens.size(); ++i) {
    const Token& t = tree.tokens[i];
    if (t.id != static_cast<int>(i) + 1) {
      return "token ids are not contiguous at position " + std::to_string(i + 1);
    }
    if (t.upos.empty()) return "token " + std::to_string(t.id) + " has empty UPOS";
  }
  const std::vector<int> heads = tree.heads();
  return head_vector_error(heads);
}

namespace {

constexpr std::array<const char*, 4> kPlaceholderUpos = {"NOUN", "VERB", "ADJ", "DET"};
constexpr std::array<const char*, 6> kPlaceholderDeprels = {"nsubj", "obj",    "amod",
                                                            "det",   "advmod", "obl"};

DepTree placeholder_tree(std::span<const int> heads, std::mt19937_64* rng) {
  DepTree tree;
  tree.tokens.reserve(heads.size());
  std::uniform_int_distribution<std::size_t> pick(0, kPlaceholderDeprels.size() - 1);
  for (std::size_t i = 0; i < heads.size(); ++i) {
    Token t;
    t.id = static_cast<int>(i) + 1;
    t.form = "w" + std::to_string(t.id);
    t.lemma = t.form;
    t.upos = kPlaceholderUpos[i % kPlaceholderUpos.size()];
    t.head = heads[i];
    if (t.head == 0) {
      t.deprel = "root";
    } else {
      t.deprel = rng ? kPlaceholderDeprels[pick(*rng)] : "dep";
    }
    tree.tokens.push_back(std::move(t));
  }
  return tree;
}

}  // namespace

DepTree tree_from_heads(std::span<const int> heads) { return placeholder_tree(heads, nullptr); }

std::vector<std::vector<int>> children_of(const DepTree& tree) {
  std::vector<std::vector<int>> kids(tree.size() + 1);
  for (const Token& t : tree.tokens) {
    if (t.head >= 0 && static_cast<std::size_t>(t.head) <= tree.size()) {
      kids[static_cast<std::size_t>(t.head)].push_back(t.id);
    }
  }
  return kids;
}

bool is_projective(const DepTree& tree) {
  // A tree is projective iff every subtree covers a contiguous interval.
  const int n = static_cast<int>(tree.size());
  const auto kids = children_of(tree);
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(n));
  order.push_back(tree.root());
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (int c : kids[order[i]]) order.push_back(c);
  }
  std::vector<int> lo(n + 1), hi(n + 1), size(n + 1, 1);
  for (int i = 1; i <= n; ++i) lo[i] = hi[i] = i;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int v = *it;
    if (hi[v] - lo[v] + 1 != size[v]) return false;
    const int h = tree.at(v).head;
    if (h == 0) continue;
    lo[h] = std::min(lo[h], lo[v]);
    hi[h] = std::max(hi[h], hi[v]);
    size[h] += size[v];
  }
  return true;
}

std::optional<std::pair<Arc, Arc>> find_crossing_arcs(const DepTree& tree) {
  const auto& toks = tree.tokens;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    const int a1 = std::min(toks[i].head, toks[i].id);
    const int b1 = std::max(toks[i].head, toks[i].id);
    for (std::size_t j = i + 1; j < toks.size(); ++j) {
      const int a2 = std::min(toks[j].head, toks[j].id);
      const int b2 = std::max(toks[j].head, toks[j].id);
      if ((a1 < a2 && a2 < b1 && b1 < b2) || (a2 < a1 && a1 < b2 && b2 < b1)) {
        return std::make_pair(Arc{toks[i].head, toks[i].id}, Arc{toks[j].head, toks[j].id});
      }
    }
  }
  return std::nullopt;
}

DepTree random_tree(int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("random_tree: n must be at least 1");
  std::mt19937_64 rng(seed);
  std::vector<int> heads(static_cast<std::size_t>(n), 0);
  if (n == 1) return placeholder_tree(heads, &rng);

  std::uniform_int_distribution<int> node(1, n);
  std::vector<int> pruefer(static_cast<std::size_t>(n - 2));
  for (int& p : pruefer) p = node(rng);
  const int root = node(rng);

  // Decode the sequence into an undirected edge list.
  std::vector<int> degree(static_cast<std::size_t>(n + 1), 1);
  for (int p : pruefer) ++degree[p];
  std::priority_queue<int, std::vector<int>, std::greater<>> leaves;
  for (int v = 1; v <= n; ++v) {
    if (degree[v] == 1) leaves.push(v);
  }
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n + 1));
  auto link = [&adj](int a, int b) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  };
  for (int p : pruefer) {
    const int leaf = leaves.top();
    leaves.pop();
    link(leaf, p);
    if (--degree[p] == 1) leaves.push(p);
  }
  const int u = leaves.top();
  leaves.pop();
  link(u, leaves.top());

  // Orient away from the chosen root.
  std::vector<bool> seen(static_cast<std::size_t>(n + 1), false);
  std::vector<int> frontier{root};
  seen[root] = true;
  while (!frontier.empty()) {
    const int v = frontier.back();
    frontier.pop_back();
    for (int w : adj[v]) {
      if (seen[w]) continue;
      seen[w] = true;
      heads[w - 1] = v;
      frontier.push_back(w);
    }
  }
  return placeholder_tree(heads, &rng);
}

DepTree random_projective_tree(int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("random_projective_tree: n must be at least 1");
  std::mt19937_64 rng(seed);
  std::vector<int> heads(static_cast<std::size_t>(n), 0);
  struct Interval {
    int lo, hi, parent;
  };
  std::vector<Interval> work{{1, n, 0}};
  while (!work.empty()) {
    const Interval cur = work.back();
    work.pop_back();
    if (cur.lo > cur.hi) continue;
    std::uniform_int_distribution<int> pick(cur.lo, cur.hi);
    const int h = pick(rng);
    heads[h - 1] = cur.parent;
    // Each side is cut into consecutive runs, one dependent subtree per run,
    // so a head can take several dependents on either side.
    for (const auto [lo, hi] : {std::pair{cur.lo, h - 1}, std::pair{h + 1, cur.hi}}) {
      int start = lo;
      for (int i = lo; i < hi; ++i) {
        if (rng() & 1u) {
          work.push_back({start, i, h});
          start = i + 1;
        }
      }
      work.push_back({start, hi, h});
    }
  }
  return placeholder_tree(heads, &rng);
}

}  // namespace salsa
