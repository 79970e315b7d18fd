#ifndef SALSA_SEQLABEL_H_
#define SALSA_SEQLABEL_H_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "salsa/conllu.h"
#include "salsa/polarity.h"
#include "salsa/tree.h"

namespace salsa {

// Tree-to-tag encodings for dependency parsing as sequence labeling.
//
//   kRelOffset  head - id; 0 marks the root.
//   kRelPos     (upos, k): the head is the k-th word tagged upos to the right
//               (k > 0) or left (k < 0) of the word; ("ROOT", 0) for the root.
//   kBrackets   two bracket planes; see BracketLabel. Projective trees only.
enum class Scheme { kRelOffset, kRelPos, kBrackets };

std::string_view to_string(Scheme scheme);
std::optional<Scheme> parse_scheme(std::string_view name);

struct RelOffsetLabel {
  int offset = 0;
  friend bool operator==(const RelOffsetLabel&, const RelOffsetLabel&) = default;
};

inline constexpr std::string_view kRootPos = "ROOT";

struct RelPosLabel {
  std::string upos;
  int k = 0;
  friend bool operator==(const RelPosLabel&, const RelPosLabel&) = default;
};

// Symbols in processing order: '\'* '<'? '>'? '/'*.
//   '<'  the word is a left dependent (its head is to the right)
//   '\'  closes the nearest open '<': this word is that dependent's head
//   '/'  opens one right arc headed at this word
//   '>'  closes the nearest open '/': the word is a right dependent of it
struct BracketLabel {
  std::string symbols;
  friend bool operator==(const BracketLabel&, const BracketLabel&) = default;
};

using LabelPayload = std::variant<RelOffsetLabel, RelPosLabel, BracketLabel>;

struct SyntaxLabel {
  LabelPayload payload;
  std::string deprel;

  Scheme scheme() const { return static_cast<Scheme>(payload.index()); }
  friend bool operator==(const SyntaxLabel&, const SyntaxLabel&) = default;
};

struct LabelSeq {
  Scheme scheme = Scheme::kRelOffset;
  std::vector<SyntaxLabel> labels;
  std::optional<Polarity> sentence_polarity;

  friend bool operator==(const LabelSeq&, const LabelSeq&) = default;
};

class EncodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LabelFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws TreeError for invalid trees and EncodeError for non-projective trees
// under kBrackets.
LabelSeq encode(const DepTree& tree, Scheme scheme);

LabelSeq emit_multitask_labels(const DepTree& tree, Scheme scheme, Polarity polarity);

struct RepairStats {
  std::size_t out_of_range = 0;  // includes self loops and unmatched REL_POS
  std::size_t extra_roots = 0;
  std::size_t missing_root = 0;
  std::size_t cycles = 0;
  std::size_t bracket_mismatches = 0;

  std::size_t total() const {
    return out_of_range + extra_roots + missing_root + cycles + bracket_mismatches;
  }
  RepairStats& operator+=(const RepairStats& other);
};

// Head proposal meaning "no head could be resolved".
inline constexpr int kNoHead = -1;

struct RepairResult {
  std::vector<int> heads;
  RepairStats stats;
};

// Turns arbitrary head proposals into a valid head vector:
//   1. out-of-range, self-looping or unresolved heads become 0;
//   2. among several roots the leftmost stays, the others attach to it;
//   3. with no root, token 1 becomes the root;
//   4. each remaining cycle is broken by attaching its smallest id to the root.
// Throws std::invalid_argument when proposals is empty.
RepairResult repair(std::span<const int> proposals);

struct DecodeResult {
  DepTree tree;
  RepairStats repairs;
};

// Rebuilds a tree from labels over the given words (id, form, lemma and upos
// are taken from `words`; heads and deprels from the labels). Never fails on
// ill-formed labels; repairs are counted instead. Throws std::invalid_argument
// if the label and word counts differ or are zero.
DecodeResult decode(const LabelSeq& labels, std::span<const Token> words);

// Label spelling in the tagger-bridge format, without the "@class" suffix.
std::string format_label(const SyntaxLabel& label);
SyntaxLabel parse_label(std::string_view text, Scheme scheme);

// One line: sent_id TAB form/upos/label SPACE ... with an optional "@class"
// after the final label. In forms, '\', '/' and ' ' are escaped as "\\",
// "\/" and "\s".
std::string format_bridge_line(const DepTree& tree, const LabelSeq& labels);

struct BridgeRecord {
  std::string sentence_id;
  std::vector<Token> words;
  LabelSeq labels;
};

// Throws LabelFormatError on malformed lines.
BridgeRecord parse_bridge_line(std::string_view line, Scheme scheme);

struct TaggedSentence {
  LabelSeq labels;
  DepTree tree;
  RepairStats repairs;
};

class TaggerOutputReader {
 public:
  TaggerOutputReader(std::istream& in, Scheme scheme, ErrorPolicy policy = ErrorPolicy::kSkip);

  std::optional<TaggedSentence> next();

  const std::vector<RecordError>& errors() const { return errors_; }
  const RepairStats& repairs() const { return repairs_; }

 private:
  std::istream& in_;
  Scheme scheme_;
  ErrorPolicy policy_;
  std::size_t line_no_ = 0;
  std::size_t ordinal_ = 0;
  std::vector<RecordError> errors_;
  RepairStats repairs_;
};

std::vector<TaggedSentence> parse_tagger_output(std::istream& in, Scheme scheme,
                                                ErrorPolicy policy = ErrorPolicy::kSkip,
                                                std::vector<RecordError>* errors = nullptr);

}  // namespace salsa

#endif  // SALSA_SEQLABEL_H_
