#ifndef SALSA_LEXICON_H_
#define SALSA_LEXICON_H_

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace salsa {

inline constexpr double kMaxValence = 5.0;

// Lowercases ASCII and the Latin-1 / Latin Extended-A letters used by the
// shipped languages; other bytes pass through unchanged.
std::string lowercase(std::string_view text);

class LexiconError : public std::runtime_error {
 public:
  LexiconError(std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct LexEntry {
  std::string term;
  std::string upos;  // empty = any
  double valence = 0.0;
};

struct ShifterInventory {
  std::set<std::string> negators;
  std::map<std::string, double> intensifiers;  // lemma -> s, scales by (1 + s)
  std::set<std::string> adversatives;

  bool empty() const { return negators.empty() && intensifiers.empty() && adversatives.empty(); }
};

struct Shifter {
  enum class Kind { kNone, kNegator, kIntensifier, kAdversative };
  Kind kind = Kind::kNone;
  double strength = 0.0;  // intensifiers only
};

// Adjacent token pairs that act as a single shifter lemma, e.g. "at all".
using CollocationTable = std::map<std::pair<std::string, std::string>, std::string>;

// Term valences stacked in override layers (later layers shadow earlier ones)
// plus shifter inventories and collocations. Immutable once built.
class PolarityLexicon {
 public:
  PolarityLexicon() = default;
  explicit PolarityLexicon(std::string language) : language_(std::move(language)) {}

  const std::string& language() const { return language_; }
  const ShifterInventory& shifters() const { return shifters_; }
  const CollocationTable& collocations() const { return collocations_; }
  std::size_t layer_count() const { return layers_.size(); }
  std::size_t entry_count() const;

  // Topmost layer holding the term wins; within a layer an entry restricted to
  // `upos` beats an unrestricted one. Case-insensitive.
  std::optional<double> lookup(std::string_view lemma, std::string_view upos) const;
  Shifter classify_shifter(std::string_view lemma) const;

  // All entries of the topmost layer defining each key, sorted by key.
  std::vector<LexEntry> entries() const;

  PolarityLexicon with_collocations(CollocationTable table) const;

  friend PolarityLexicon load_lexicon(std::istream& in, std::string language);
  friend PolarityLexicon overlay(const PolarityLexicon& base, const PolarityLexicon& domain);

 private:
  using Layer = std::unordered_map<std::string, double>;  // "term\tupos" -> valence

  std::string language_;
  std::vector<Layer> layers_;
  ShifterInventory shifters_;
  CollocationTable collocations_;
};

// Rows: term TAB upos-or-empty TAB value, where value is a valence in [-5, 5],
// NEG, INT:<strength> (strength > -1) or ADV. '#' starts a comment line.
// Throws LexiconError.
PolarityLexicon load_lexicon(std::istream& in, std::string language);
PolarityLexicon load_lexicon_file(const std::string& path, std::string language);

// Rows: "token1 token2" TAB merged_lemma. Throws LexiconError.
CollocationTable load_collocations(std::istream& in);
CollocationTable load_collocations_file(const std::string& path);

// Domain entries shadow base entries; shifter sets are merged with the domain
// classification winning. Throws LexiconError on a language mismatch.
PolarityLexicon overlay(const PolarityLexicon& base, const PolarityLexicon& domain);

}  // namespace salsa

#endif  // SALSA_LEXICON_H_
