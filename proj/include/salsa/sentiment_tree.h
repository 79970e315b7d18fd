#ifndef SALSA_SENTIMENT_TREE_H_
#define SALSA_SENTIMENT_TREE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "salsa/polarity.h"
#include "salsa/rules.h"
#include "salsa/seqlabel.h"
#include "salsa/tree.h"

namespace salsa {

struct Word {
  std::string form;
  std::string upos;
  friend bool operator==(const Word&, const Word&) = default;
};

// A (holder, target, expression, polarity) tuple over token-id spans.
struct Opinion {
  std::optional<TokenSpan> holder;
  std::optional<TokenSpan> target;
  TokenSpan expression;
  Polarity polarity = Polarity::kNeutral;
  friend bool operator==(const Opinion&, const Opinion&) = default;
};

struct OpinionSet {
  std::string sentence_id;
  std::vector<Word> words;
  std::vector<Opinion> opinions;
  friend bool operator==(const OpinionSet&, const OpinionSet&) = default;
};

class SentimentTreeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Relation names used inside sentiment trees.
inline constexpr std::string_view kExpressionPrefix = "exp:";
inline constexpr std::string_view kTargetRel = "targ";
inline constexpr std::string_view kHolderRel = "hold";
inline constexpr std::string_view kSpanRel = "span";
inline constexpr std::string_view kNoneRel = "none";

// Empty if every span is in bounds and no two spans share a token; otherwise
// a description naming the offending opinions.
std::optional<std::string> opinion_set_error(const OpinionSet& os);

// Positional construction: a span's first token heads it and the rest attach
// with "span"; the first opinion's expression head is the root
// ("exp:<polarity>"), later expression heads attach to it; target and holder
// heads attach to their expression head ("targ", "hold"); everything else
// attaches to the root with "none". Throws SentimentTreeError on overlapping
// or out-of-bounds spans.
DepTree to_tree(const OpinionSet& os);

// Inverse of to_tree on its image; opinions come back ordered by expression
// position. Throws SentimentTreeError.
OpinionSet from_tree(const DepTree& tree);

// Opinions sorted by expression position, which from_tree reproduces.
OpinionSet canonical(OpinionSet os);

LabelSeq encode_sentiment_tree(const OpinionSet& os, Scheme scheme = Scheme::kRelOffset);

struct DecodedOpinions {
  OpinionSet opinions;
  RepairStats repairs;
};

DecodedOpinions decode_sentiment_tree(const LabelSeq& labels, std::span<const Word> words);

// Random canonical OpinionSet with disjoint contiguous spans.
OpinionSet random_opinion_set(int n, int max_opinions, std::uint64_t seed);

}  // namespace salsa

#endif  // SALSA_SENTIMENT_TREE_H_
