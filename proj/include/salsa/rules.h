#ifndef SALSA_RULES_H_
#define SALSA_RULES_H_

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "salsa/lexicon.h"
#include "salsa/polarity.h"
#include "salsa/tree.h"

namespace salsa {

enum class NegationScope { kHeadSubtree };

struct RuleConfig {
  // A negated valence v becomes clamp(v - sign(v) * negation_shift, +-negation_cap).
  double negation_shift = 4.0;
  double negation_cap = 5.0;
  // Sentence valence around an adversative marker is
  // before_weight * (material before) + after_weight * (material after).
  double adversative_before = 0.5;
  double adversative_after = 1.5;
  double neutral_threshold = 0.5;
  NegationScope negation_scope = NegationScope::kHeadSubtree;

  // Throws std::invalid_argument if an invariant does not hold.
  void validate() const;
};

// Flat "key = value" file; keys are negation_shift, negation_cap,
// adversative_weights ("before, after"), neutral_threshold and
// negation_scope (HEAD_SUBTREE). Throws std::invalid_argument.
RuleConfig load_rule_config(std::istream& in);
RuleConfig load_rule_config_file(const std::string& path);

enum class Rule { kLexicon, kIntensify, kNegate, kAdversative, kAggregate };
std::string_view to_string(Rule rule);

struct TraceStep {
  int token_id = 0;
  Rule rule = Rule::kAggregate;
  double before = 0.0;
  double after = 0.0;
  std::string note;
};

// Replays a trace from zero. LEXICON, INTENSIFY and NEGATE steps add
// (after - before) to the running total; ADVERSATIVE and AGGREGATE steps
// rewrite the total from `before` to `after`.
double replay_trace(std::span<const TraceStep> trace);

// Inclusive range of 1-based token ids.
struct TokenSpan {
  int first = 0;
  int last = 0;

  int size() const { return last - first + 1; }
  bool contains(int id) const { return id >= first && id <= last; }
  bool overlaps(const TokenSpan& o) const { return first <= o.last && o.first <= last; }
  friend bool operator==(const TokenSpan&, const TokenSpan&) = default;
};

struct TargetCandidate {
  TokenSpan span;
  int head = 0;
  friend bool operator==(const TargetCandidate&, const TargetCandidate&) = default;
};

struct TargetOpinion {
  TokenSpan target;
  std::string target_text;
  double valence = 0.0;
  Polarity polarity = Polarity::kNeutral;
  std::vector<int> evidence;
  std::vector<TraceStep> trace;  // replays to `valence`
};

struct SentimentResult {
  double valence = 0.0;
  Polarity polarity = Polarity::kNeutral;
  std::vector<TargetOpinion> opinions;
  std::vector<TraceStep> trace;  // replays to `valence`
};

struct TreeScore {
  double valence = 0.0;
  std::vector<TraceStep> trace;
};

class TargetError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Per-token lemmas after the collocation pass: the syntactic head of a matched
// pair carries the merged lemma and the other token becomes empty (inert).
std::vector<std::string> effective_lemmas(const DepTree& tree, const PolarityLexicon& lex);

// Post-order composition over the dependency tree with intensification,
// negation over the negated head's subtree and a linear adversative split.
TreeScore score_tree(const DepTree& tree, const PolarityLexicon& lex, const RuleConfig& cfg);

SentimentResult classify_sentence(const DepTree& tree, const PolarityLexicon& lex,
                                  const RuleConfig& cfg);

// One candidate per NOUN/PROPN head, left to right. Spans grow over adjacent
// compound, flat and amod material inside the head's subtree.
std::vector<TargetCandidate> extract_targets(const DepTree& tree);

// Throws TargetError if `target` is not one of extract_targets(tree).
TargetOpinion score_target(const DepTree& tree, const PolarityLexicon& lex, const RuleConfig& cfg,
                           const TokenSpan& target);

SentimentResult analyze(const DepTree& tree, const PolarityLexicon& lex, const RuleConfig& cfg);

struct BaselineScore {
  double valence = 0.0;
  Polarity polarity = Polarity::kNeutral;
  friend bool operator==(const BaselineScore&, const BaselineScore&) = default;
};

// Sums lexicon valences with no syntax and no shifters.
BaselineScore baseline_wordcount(std::span<const Token> tokens, const PolarityLexicon& lex,
                                 const RuleConfig& cfg);

}  // namespace salsa

#endif  // SALSA_RULES_H_
