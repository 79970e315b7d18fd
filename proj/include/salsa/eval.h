#ifndef SALSA_EVAL_H_
#define SALSA_EVAL_H_

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "salsa/conllu.h"
#include "salsa/polarity.h"
#include "salsa/sentiment_tree.h"
#include "salsa/tree.h"

namespace salsa {

class EvalError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// One line of the structured-opinion gold format. Opinion spans arrive as
// half-open character offsets and are resolved to the tokens they touch.
struct GoldRecord {
  std::string sentence_id;
  std::string text;
  std::optional<Polarity> gold_class;
  bool has_opinions = false;
  OpinionSet gold_opinions;  // words are always filled in
  std::optional<DepTree> parse;
};

// Streaming reader for the gold JSON-lines format. Malformed JSON is reported
// with its line and byte offset.
class GoldReader {
 public:
  explicit GoldReader(std::istream& in, ErrorPolicy policy = ErrorPolicy::kSkip);

  std::optional<GoldRecord> next();
  const std::vector<RecordError>& errors() const { return errors_; }

 private:
  std::istream& in_;
  ErrorPolicy policy_;
  std::size_t line_no_ = 0;
  std::size_t byte_offset_ = 0;
  std::size_t ordinal_ = 0;
  std::vector<RecordError> errors_;
};

// Parses one gold record; throws EvalError.
GoldRecord parse_gold_record(const std::string& json_line);

std::vector<GoldRecord> load_gold(std::istream& in, ErrorPolicy policy = ErrorPolicy::kSkip,
                                  std::vector<RecordError>* errors = nullptr);

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct SentenceMetrics {
  double accuracy = 0.0;
  std::array<ClassScores, 3> per_class{};  // indexed by Polarity
  double macro_f1 = 0.0;
  std::size_t count = 0;

  const ClassScores& of(Polarity p) const { return per_class[static_cast<std::size_t>(p)]; }
};

// Confusion counts; merge() is associative and commutative so shards can be
// combined in any order.
class SentenceAccumulator {
 public:
  void add(Polarity pred, Polarity gold);
  void merge(const SentenceAccumulator& other);
  SentenceMetrics metrics() const;

 private:
  std::array<std::array<std::size_t, 3>, 3> confusion_{};  // [gold][pred]
};

// Macro-F1 averages over all three classes; a class with no gold and no
// predicted items scores P = R = F1 = 0. Throws EvalError on length mismatch.
SentenceMetrics eval_sentences(std::span<const Polarity> pred, std::span<const Polarity> gold);

enum class MatchMode { kExact, kOverlap };

struct TargetMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t matched = 0;
  std::size_t predicted = 0;
  std::size_t gold = 0;
};

class TargetAccumulator {
 public:
  void add(const OpinionSet& pred, const OpinionSet& gold, MatchMode mode);
  void merge(const TargetAccumulator& other);
  TargetMetrics metrics() const;

 private:
  std::size_t matched_ = 0;
  std::size_t predicted_ = 0;
  std::size_t gold_ = 0;
};

// Matches (target span, polarity) pairs one-to-one, greedily left to right.
// Overlap mode first takes exact matches, then any shared token. Opinions
// without a target are not scored. Predictions are aligned to gold by
// sentence_id; an unknown id throws EvalError.
TargetMetrics eval_targets(std::span<const OpinionSet> pred, std::span<const OpinionSet> gold,
                           MatchMode mode);

struct ParseMetrics {
  double uas = 0.0;
  double las = 0.0;
  std::size_t tokens = 0;
};

class ParseAccumulator {
 public:
  void add(const DepTree& pred, const DepTree& gold);
  void merge(const ParseAccumulator& other);
  ParseMetrics metrics() const;

 private:
  std::size_t tokens_ = 0;
  std::size_t heads_ = 0;
  std::size_t labeled_ = 0;
};

// Throws EvalError on tree-count or token-count mismatch.
ParseMetrics eval_parse(std::span<const DepTree> pred, std::span<const DepTree> gold);

struct MetricsReport {
  std::optional<SentenceMetrics> sentence;
  std::optional<TargetMetrics> targets_exact;
  std::optional<TargetMetrics> targets_overlap;
  std::optional<ParseMetrics> parse;
  std::size_t sentences = 0;
  std::size_t opinions = 0;
  double conversion_coverage = 0.0;  // share of opinion sets that to_tree accepts
};

std::string metrics_to_json(const MetricsReport& report, int indent = 2);

}  // namespace salsa

#endif  // SALSA_EVAL_H_
