#include "salsa/lexicon.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>

namespace salsa {

namespace {

std::string make_key(std::string_view term, std::string_view upos) {
  std::string key(term);
  key += '\t';
  key += upos;
  return key;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

char32_t lower_codepoint(char32_t cp) {
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
  if (cp >= 0x100 && cp <= 0x137) return cp % 2 == 0 ? cp + 1 : cp;
  if (cp >= 0x139 && cp <= 0x148) return cp % 2 == 1 ? cp + 1 : cp;
  if (cp >= 0x14A && cp <= 0x177) return cp % 2 == 0 ? cp + 1 : cp;
  if (cp == 0x178) return 0xFF;
  if (cp >= 0x179 && cp <= 0x17E) return cp % 2 == 1 ? cp + 1 : cp;
  return cp;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string_view::npos ? tab : tab - start));
    if (tab == std::string_view::npos) return out;
    start = tab + 1;
  }
}

std::optional<double> parse_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string lowercase(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (c < 0x80) {
      out += static_cast<char>(c >= 'A' && c <= 'Z' ? c + 32 : c);
      continue;
    }
    if ((c & 0xE0) == 0xC0 && i + 1 < text.size()) {
      const auto c2 = static_cast<unsigned char>(text[i + 1]);
      const char32_t cp = (static_cast<char32_t>(c & 0x1F) << 6) | (c2 & 0x3F);
      const char32_t lowered = lower_codepoint(cp);
      if (lowered != cp && lowered < 0x800) {
        append_utf8(out, lowered);
      } else {
        out += text[i];
        out += text[i + 1];
      }
      ++i;
      continue;
    }
    out += text[i];
  }
  return out;
}

LexiconError::LexiconError(std::size_t line, const std::string& message)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
      line_(line) {}

std::size_t PolarityLexicon::entry_count() const { return entries().size(); }

std::optional<double> PolarityLexicon::lookup(std::string_view lemma, std::string_view upos) const {
  const std::string term = lowercase(lemma);
  const std::string constrained = make_key(term, upos);
  const std::string open = make_key(term, "");
  for (auto layer = layers_.rbegin(); layer != layers_.rend(); ++layer) {
    if (!upos.empty()) {
      if (auto it = layer->find(constrained); it != layer->end()) return it->second;
    }
    if (auto it = layer->find(open); it != layer->end()) return it->second;
  }
  return std::nullopt;
}

Shifter PolarityLexicon::classify_shifter(std::string_view lemma) const {
  const std::string term = lowercase(lemma);
  if (shifters_.negators.count(term)) return {Shifter::Kind::kNegator, 0.0};
  if (auto it = shifters_.intensifiers.find(term); it != shifters_.intensifiers.end()) {
    return {Shifter::Kind::kIntensifier, it->second};
  }
  if (shifters_.adversatives.count(term)) return {Shifter::Kind::kAdversative, 0.0};
  return {};
}

std::vector<LexEntry> PolarityLexicon::entries() const {
  std::map<std::string, double> merged;
  for (const Layer& layer : layers_) {
    for (const auto& [key, v] : layer) merged[key] = v;
  }
  std::vector<LexEntry> out;
  out.reserve(merged.size());
  for (const auto& [key, v] : merged) {
    const std::size_t tab = key.find('\t');
    out.push_back({key.substr(0, tab), key.substr(tab + 1), v});
  }
  return out;
}

PolarityLexicon PolarityLexicon::with_collocations(CollocationTable table) const {
  PolarityLexicon out = *this;
  for (auto& [pair, lemma] : table) out.collocations_[pair] = std::move(lemma);
  return out;
}

PolarityLexicon load_lexicon(std::istream& in, std::string language) {
  PolarityLexicon lex(std::move(language));
  PolarityLexicon::Layer layer;
  ShifterInventory& sh = lex.shifters_;
  std::map<std::string, std::size_t> shifter_rows;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line.front() == '#') continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 3) {
      throw LexiconError(line_no, "expected 3 tab-separated columns, found " +
                                      std::to_string(fields.size()));
    }
    const std::string term = lowercase(trim(fields[0]));
    const std::string upos(trim(fields[1]));
    const std::string_view field = trim(fields[2]);
    if (term.empty()) throw LexiconError(line_no, "empty term");

    if (field == "NEG" || field == "ADV" || field.substr(0, 4) == "INT:") {
      if (auto prev = shifter_rows.find(term); prev != shifter_rows.end()) {
        throw LexiconError(line_no, "shifter '" + term + "' already defined on line " +
                                        std::to_string(prev->second));
      }
      shifter_rows[term] = line_no;
      if (field == "NEG") {
        sh.negators.insert(term);
      } else if (field == "ADV") {
        sh.adversatives.insert(term);
      } else {
        const auto strength = parse_double(field.substr(4));
        if (!strength) throw LexiconError(line_no, "bad intensifier strength '" + std::string(field) + "'");
        if (*strength <= -1.0) {
          throw LexiconError(line_no, "intensifier strength must be > -1, got " + std::string(field.substr(4)));
        }
        sh.intensifiers[term] = *strength;
      }
      continue;
    }

    const auto valence = parse_double(field);
    if (!valence) throw LexiconError(line_no, "unknown entry class '" + std::string(field) + "'");
    if (std::fabs(*valence) > kMaxValence) {
      throw LexiconError(line_no, "valence " + std::string(field) + " outside [-5, 5]");
    }
    if (!layer.emplace(make_key(term, upos), *valence).second) {
      throw LexiconError(line_no, "duplicate entry for (" + term + ", " +
                                      (upos.empty() ? std::string("any") : upos) + ")");
    }
  }
  lex.layers_.push_back(std::move(layer));
  return lex;
}

PolarityLexicon load_lexicon_file(const std::string& path, std::string language) {
  std::ifstream in(path);
  if (!in) throw LexiconError(0, "cannot open lexicon '" + path + "'");
  return load_lexicon(in, std::move(language));
}

CollocationTable load_collocations(std::istream& in) {
  CollocationTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line.front() == '#') continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 2) throw LexiconError(line_no, "expected 'token1 token2<TAB>lemma'");
    const std::string_view pair = trim(fields[0]);
    const std::size_t space = pair.find(' ');
    if (space == std::string_view::npos || pair.find(' ', space + 1) != std::string_view::npos) {
      throw LexiconError(line_no, "collocation must have exactly two tokens");
    }
    const std::string merged = lowercase(trim(fields[1]));
    if (merged.empty()) throw LexiconError(line_no, "empty merged lemma");
    table[{lowercase(pair.substr(0, space)), lowercase(pair.substr(space + 1))}] = merged;
  }
  return table;
}

CollocationTable load_collocations_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LexiconError(0, "cannot open collocation table '" + path + "'");
  return load_collocations(in);
}

PolarityLexicon overlay(const PolarityLexicon& base, const PolarityLexicon& domain) {
  if (base.language_ != domain.language_) {
    throw LexiconError(0, "cannot overlay a '" + domain.language_ + "' lexicon on a '" +
                              base.language_ + "' lexicon");
  }
  PolarityLexicon out = base;
  out.layers_.insert(out.layers_.end(), domain.layers_.begin(), domain.layers_.end());

  ShifterInventory& sh = out.shifters_;
  auto reclassify = [&sh](const std::string& term) {
    sh.negators.erase(term);
    sh.intensifiers.erase(term);
    sh.adversatives.erase(term);
  };
  for (const auto& t : domain.shifters_.negators) {
    reclassify(t);
    sh.negators.insert(t);
  }
  for (const auto& [t, s] : domain.shifters_.intensifiers) {
    reclassify(t);
    sh.intensifiers[t] = s;
  }
  for (const auto& t : domain.shifters_.adversatives) {
    reclassify(t);
    sh.adversatives.insert(t);
  }
  for (const auto& [pair, lemma] : domain.collocations_) out.collocations_[pair] = lemma;
  return out;
}

}  // namespace salsa
