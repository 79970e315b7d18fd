#include "salsa/sentiment_tree.h"

#include <algorithm>
#include <array>
#include <map>
#include <random>

namespace salsa {

namespace {

std::string describe(const TokenSpan& s) {
  return "[" + std::to_string(s.first) + ", " + std::to_string(s.last) + "]";
}

enum class Role { kExpression, kTarget, kHolder };

std::string role_name(Role r) {
  switch (r) {
    case Role::kExpression:
      return "expression";
    case Role::kTarget:
      return "target";
    case Role::kHolder:
      return "holder";
  }
  return "span";
}

}  // namespace

std::optional<std::string> opinion_set_error(const OpinionSet& os) {
  const int n = static_cast<int>(os.words.size());
  struct Owner {
    int opinion = -1;
    Role role = Role::kExpression;
  };
  std::vector<Owner> owner(static_cast<std::size_t>(n + 1));
  for (std::size_t i = 0; i < os.opinions.size(); ++i) {
    const Opinion& op = os.opinions[i];
    std::vector<std::pair<Role, TokenSpan>> spans{{Role::kExpression, op.expression}};
    if (op.target) spans.push_back({Role::kTarget, *op.target});
    if (op.holder) spans.push_back({Role::kHolder, *op.holder});
    for (const auto& [role, span] : spans) {
      if (span.first < 1 || span.last > n || span.first > span.last) {
        return "opinion " + std::to_string(i) + ": " + role_name(role) + " span " + describe(span) +
               " outside a sentence of " + std::to_string(n) + " tokens";
      }
      for (int t = span.first; t <= span.last; ++t) {
        Owner& o = owner[static_cast<std::size_t>(t)];
        if (o.opinion >= 0) {
          return "opinion " + std::to_string(o.opinion) + " (" + role_name(o.role) + ") and opinion " +
                 std::to_string(i) + " (" + role_name(role) + ") overlap at token " + std::to_string(t);
        }
        o = {static_cast<int>(i), role};
      }
    }
  }
  return std::nullopt;
}

DepTree to_tree(const OpinionSet& os) {
  const int n = static_cast<int>(os.words.size());
  if (n == 0) throw SentimentTreeError("cannot build a sentiment tree for an empty sentence");
  if (auto problem = opinion_set_error(os)) throw SentimentTreeError(*problem);

  DepTree tree;
  tree.sentence_id = os.sentence_id;
  tree.tokens.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Token& t = tree.tokens[static_cast<std::size_t>(i)];
    t.id = i + 1;
    t.form = os.words[static_cast<std::size_t>(i)].form;
    t.lemma = "_";
    t.upos = os.words[static_cast<std::size_t>(i)].upos.empty() ? "X" : os.words[static_cast<std::size_t>(i)].upos;
    t.head = -1;
  }
  auto attach = [&tree](int id, int head, std::string deprel) {
    Token& t = tree.tokens[static_cast<std::size_t>(id - 1)];
    t.head = head;
    t.deprel = std::move(deprel);
  };
  auto attach_span = [&](const TokenSpan& span, int head, std::string deprel) {
    attach(span.first, head, std::move(deprel));
    for (int id = span.first + 1; id <= span.last; ++id) attach(id, span.first, std::string(kSpanRel));
  };

  const int root = os.opinions.empty() ? 1 : os.opinions.front().expression.first;
  for (std::size_t i = 0; i < os.opinions.size(); ++i) {
    const Opinion& op = os.opinions[i];
    const int exp_head = op.expression.first;
    attach_span(op.expression, i == 0 ? 0 : root,
                std::string(kExpressionPrefix) + std::string(to_string(op.polarity)));
    if (op.target) attach_span(*op.target, exp_head, std::string(kTargetRel));
    if (op.holder) attach_span(*op.holder, exp_head, std::string(kHolderRel));
  }
  for (Token& t : tree.tokens) {
    if (t.head != -1) continue;
    t.head = t.id == root ? 0 : root;
    t.deprel = kNoneRel;
  }
  return tree;
}

OpinionSet from_tree(const DepTree& tree) {
  if (auto problem = validation_error(tree)) throw SentimentTreeError("invalid tree: " + *problem);
  const int n = static_cast<int>(tree.size());

  enum class Kind { kNone, kExpression, kTarget, kHolder, kSpan };
  std::vector<Kind> kind(static_cast<std::size_t>(n + 1), Kind::kNone);
  std::vector<Polarity> polarity(static_cast<std::size_t>(n + 1), Polarity::kNeutral);
  for (const Token& t : tree.tokens) {
    const std::string_view rel = t.deprel;
    Kind& k = kind[static_cast<std::size_t>(t.id)];
    if (rel.substr(0, kExpressionPrefix.size()) == kExpressionPrefix) {
      const auto p = parse_polarity(rel.substr(kExpressionPrefix.size()));
      if (!p) throw SentimentTreeError("token " + std::to_string(t.id) + ": unknown deprel '" + t.deprel + "'");
      k = Kind::kExpression;
      polarity[static_cast<std::size_t>(t.id)] = *p;
    } else if (rel == kTargetRel) {
      k = Kind::kTarget;
    } else if (rel == kHolderRel) {
      k = Kind::kHolder;
    } else if (rel == kSpanRel) {
      k = Kind::kSpan;
    } else if (rel != kNoneRel) {
      throw SentimentTreeError("token " + std::to_string(t.id) + ": unknown deprel '" + t.deprel + "'");
    }
  }

  // Span heads collect their "span" dependents.
  std::map<int, std::vector<int>> members;
  std::map<int, std::vector<int>> targets, holders;
  for (const Token& t : tree.tokens) {
    const Kind k = kind[static_cast<std::size_t>(t.id)];
    const Kind head_kind = kind[static_cast<std::size_t>(t.head)];
    if (k == Kind::kSpan) {
      if (t.head == 0 || head_kind == Kind::kNone || head_kind == Kind::kSpan) {
        throw SentimentTreeError("token " + std::to_string(t.id) + ": 'span' must attach to a span head");
      }
      members[t.head].push_back(t.id);
    } else if (k == Kind::kTarget || k == Kind::kHolder) {
      if (t.head == 0 || head_kind != Kind::kExpression) {
        throw SentimentTreeError("token " + std::to_string(t.id) + ": '" + t.deprel +
                                 "' must attach to an expression head");
      }
      (k == Kind::kTarget ? targets : holders)[t.head].push_back(t.id);
    }
  }
  auto span_of = [&members](int head) {
    std::vector<int> ids{head};
    if (auto it = members.find(head); it != members.end()) {
      ids.insert(ids.end(), it->second.begin(), it->second.end());
    }
    std::sort(ids.begin(), ids.end());
    for (std::size_t i = 1; i < ids.size(); ++i) {
      if (ids[i] != ids[i - 1] + 1) {
        throw SentimentTreeError("span headed at token " + std::to_string(head) + " is not contiguous");
      }
    }
    return TokenSpan{ids.front(), ids.back()};
  };
  auto single = [](const std::map<int, std::vector<int>>& m, int exp, const char* what)
      -> std::optional<int> {
    const auto it = m.find(exp);
    if (it == m.end()) return std::nullopt;
    if (it->second.size() > 1) {
      throw SentimentTreeError("expression at token " + std::to_string(exp) + " has several " + what);
    }
    return it->second.front();
  };

  OpinionSet os;
  os.sentence_id = tree.sentence_id;
  for (const Token& t : tree.tokens) os.words.push_back({t.form, t.upos});
  for (int id = 1; id <= n; ++id) {
    if (kind[static_cast<std::size_t>(id)] != Kind::kExpression) continue;
    Opinion op;
    op.expression = span_of(id);
    op.polarity = polarity[static_cast<std::size_t>(id)];
    if (auto t = single(targets, id, "targets")) op.target = span_of(*t);
    if (auto h = single(holders, id, "holders")) op.holder = span_of(*h);
    os.opinions.push_back(op);
  }
  return os;
}

OpinionSet canonical(OpinionSet os) {
  std::stable_sort(os.opinions.begin(), os.opinions.end(), [](const Opinion& a, const Opinion& b) {
    return a.expression.first < b.expression.first;
  });
  return os;
}

LabelSeq encode_sentiment_tree(const OpinionSet& os, Scheme scheme) {
  return encode(to_tree(os), scheme);
}

DecodedOpinions decode_sentiment_tree(const LabelSeq& labels, std::span<const Word> words) {
  std::vector<Token> skeleton;
  skeleton.reserve(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    Token t;
    t.id = static_cast<int>(i) + 1;
    t.form = words[i].form;
    t.lemma = "_";
    t.upos = words[i].upos.empty() ? "X" : words[i].upos;
    skeleton.push_back(std::move(t));
  }
  DecodeResult decoded = decode(labels, skeleton);
  return {from_tree(decoded.tree), decoded.repairs};
}

OpinionSet random_opinion_set(int n, int max_opinions, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("random_opinion_set: n must be at least 1");
  static constexpr std::array<const char*, 6> kUpos = {"NOUN", "VERB", "ADJ", "DET", "ADV", "PRON"};
  std::mt19937_64 rng(seed);
  OpinionSet os;
  os.sentence_id = "r" + std::to_string(seed);
  std::uniform_int_distribution<std::size_t> pick_upos(0, kUpos.size() - 1);
  for (int i = 1; i <= n; ++i) os.words.push_back({"t" + std::to_string(i), kUpos[pick_upos(rng)]});

  std::vector<bool> used(static_cast<std::size_t>(n + 1), false);
  auto place = [&]() -> std::optional<TokenSpan> {
    std::uniform_int_distribution<int> start(1, n);
    std::uniform_int_distribution<int> length(1, 3);
    for (int attempt = 0; attempt < 20; ++attempt) {
      const int first = start(rng);
      const int last = std::min(n, first + length(rng) - 1);
      bool free = true;
      for (int t = first; t <= last; ++t) free = free && !used[static_cast<std::size_t>(t)];
      if (!free) continue;
      for (int t = first; t <= last; ++t) used[static_cast<std::size_t>(t)] = true;
      return TokenSpan{first, last};
    }
    return std::nullopt;
  };

  std::uniform_int_distribution<int> count(0, max_opinions);
  std::uniform_int_distribution<std::size_t> pick_polarity(0, kAllPolarities.size() - 1);
  std::bernoulli_distribution coin(0.5);
  const int k = count(rng);
  for (int i = 0; i < k; ++i) {
    auto expression = place();
    if (!expression) break;
    Opinion op;
    op.expression = *expression;
    op.polarity = kAllPolarities[pick_polarity(rng)];
    if (coin(rng)) op.target = place();
    if (coin(rng)) op.holder = place();
    os.opinions.push_back(op);
  }
  return canonical(std::move(os));
}

}  // namespace salsa
