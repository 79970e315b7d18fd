// Independent reference implementations used by the unit and acceptance
// tests. Nothing here calls into the code under test except for data types.
#ifndef SALSA_TESTS_ORACLES_H_
#define SALSA_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "salsa/conllu.h"
#include "salsa/lexicon.h"
#include "salsa/seqlabel.h"
#include "salsa/tree.h"

#ifndef SALSA_TEST_DATA_DIR
#define SALSA_TEST_DATA_DIR "data"
#endif

namespace oracle {

inline std::string data_path(const std::string& rel) { return std::string(SALSA_TEST_DATA_DIR) + "/" + rel; }

// Follows heads from every token; a tree has exactly one root and every walk
// reaches it in at most n steps.
inline bool is_tree(const std::vector<int>& heads) {
  const int n = static_cast<int>(heads.size());
  if (n == 0) return false;
  int roots = 0;
  for (int h : heads) {
    if (h < 0 || h > n) return false;
    roots += h == 0 ? 1 : 0;
  }
  if (roots != 1) return false;
  for (int start = 1; start <= n; ++start) {
    int at = start;
    for (int steps = 0; at != 0; ++steps) {
      if (steps > n) return false;
      at = heads[static_cast<std::size_t>(at - 1)];
    }
  }
  return true;
}

// Two arcs cross iff exactly one endpoint of one lies strictly inside the
// other's span. The root arc runs from position 0.
inline int crossing_pairs(const std::vector<int>& heads) {
  const int n = static_cast<int>(heads.size());
  int crossings = 0;
  for (int a = 1; a <= n; ++a) {
    for (int b = a + 1; b <= n; ++b) {
      const int l1 = std::min(a, heads[a - 1]), r1 = std::max(a, heads[a - 1]);
      const int l2 = std::min(b, heads[b - 1]), r2 = std::max(b, heads[b - 1]);
      if ((l1 < l2 && l2 < r1 && r1 < r2) || (l2 < l1 && l1 < r2 && r2 < r1)) ++crossings;
    }
  }
  return crossings;
}

// Every head vector over n tokens (heads in 0..n), filtered to trees.
inline std::vector<std::vector<int>> all_trees(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> heads(static_cast<std::size_t>(n), 0);
  while (true) {
    if (is_tree(heads)) out.push_back(heads);
    int i = 0;
    while (i < n && heads[static_cast<std::size_t>(i)] == n) heads[static_cast<std::size_t>(i++)] = 0;
    if (i == n) break;
    ++heads[static_cast<std::size_t>(i)];
  }
  return out;
}

// Same syntax: forms, UPOS, heads and deprels, token by token.
inline bool same_syntax(const salsa::DepTree& a, const salsa::DepTree& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& x = a.tokens[i];
    const auto& y = b.tokens[i];
    if (x.id != y.id || x.form != y.form || x.upos != y.upos || x.head != y.head || x.deprel != y.deprel) {
      return false;
    }
  }
  return true;
}

// Random label sequence with no regard for well-formedness.
inline salsa::LabelSeq fuzz_labels(int n, salsa::Scheme scheme, std::mt19937_64& rng) {
  static const std::vector<std::string> kUpos = {"NOUN", "VERB", "ADJ", "DET", "ROOT", "PUNCT"};
  static const std::vector<std::string> kRels = {"nsubj", "obj", "root", "amod", "det"};
  static const std::string kSymbols = "\\<>/";
  std::uniform_int_distribution<int> offset(-n - 3, n + 3);
  std::uniform_int_distribution<int> k(-4, 4);
  std::uniform_int_distribution<std::size_t> pick(0, 1000);
  std::uniform_int_distribution<int> len(0, 5);
  salsa::LabelSeq seq;
  seq.scheme = scheme;
  for (int i = 0; i < n; ++i) {
    salsa::SyntaxLabel label;
    label.deprel = kRels[pick(rng) % kRels.size()];
    switch (scheme) {
      case salsa::Scheme::kRelOffset:
        label.payload = salsa::RelOffsetLabel{offset(rng)};
        break;
      case salsa::Scheme::kRelPos:
        label.payload = salsa::RelPosLabel{kUpos[pick(rng) % kUpos.size()], k(rng)};
        break;
      case salsa::Scheme::kBrackets: {
        std::string s;
        for (int c = len(rng); c > 0; --c) s += kSymbols[pick(rng) % kSymbols.size()];
        label.payload = salsa::BracketLabel{s};
        break;
      }
    }
    seq.labels.push_back(std::move(label));
  }
  return seq;
}

inline std::vector<salsa::Token> words_of(const salsa::DepTree& tree) {
  std::vector<salsa::Token> words = tree.tokens;
  for (auto& w : words) {
    w.head = 0;
    w.deprel.clear();
  }
  return words;
}

inline std::vector<salsa::DepTree> demo_trees() {
  std::ifstream in(data_path("demo/demo.conllu"));
  return salsa::read_conllu(in, salsa::ErrorPolicy::kAbort);
}

inline salsa::DepTree demo_tree(const std::string& id) {
  for (auto& t : demo_trees()) {
    if (t.sentence_id == id) return t;
  }
  return {};
}

inline salsa::PolarityLexicon demo_lexicon(const std::string& language) {
  auto lex = salsa::load_lexicon_file(data_path("lexicons/" + language + ".tsv"), language);
  return lex.with_collocations(salsa::load_collocations_file(data_path("lexicons/" + language + ".colloc.tsv")));
}

// Negation as documented: shift toward and past zero, then clamp.
inline double negate(double v, double shift, double cap) {
  if (v == 0.0) return 0.0;
  const double shifted = v > 0 ? v - shift : v + shift;
  return std::clamp(shifted, -cap, cap);
}

}  // namespace oracle

#endif  // SALSA_TESTS_ORACLES_H_
