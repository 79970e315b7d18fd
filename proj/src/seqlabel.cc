#include "salsa/seqlabel.h"

#include <algorithm>
#include <charconv>
#include <istream>
#include <unordered_map>

namespace salsa {

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::kRelOffset:
      return "rel-offset";
    case Scheme::kRelPos:
      return "rel-pos";
    case Scheme::kBrackets:
      return "brackets";
  }
  return "rel-offset";
}

std::optional<Scheme> parse_scheme(std::string_view name) {
  std::string lowered;
  for (char c : name) lowered += c == '_' ? '-' : static_cast<char>(std::tolower(c));
  for (Scheme s : {Scheme::kRelOffset, Scheme::kRelPos, Scheme::kBrackets}) {
    if (to_string(s) == lowered) return s;
  }
  return std::nullopt;
}

RepairStats& RepairStats::operator+=(const RepairStats& other) {
  out_of_range += other.out_of_range;
  extra_roots += other.extra_roots;
  missing_root += other.missing_root;
  cycles += other.cycles;
  bracket_mismatches += other.bracket_mismatches;
  return *this;
}

// ---------------------------------------------------------------------------
// Encoding

namespace {

std::string brackets_for(const DepTree& tree, int id, const std::vector<int>& closes,
                         const std::vector<int>& opens) {
  const Token& t = tree.at(id);
  std::string s(static_cast<std::size_t>(closes[id]), '\\');
  if (t.head > id) s += '<';
  if (t.head != 0 && t.head < id) s += '>';
  s.append(static_cast<std::size_t>(opens[id]), '/');
  return s;
}

RelPosLabel rel_pos_for(const DepTree& tree, const Token& t) {
  if (t.head == 0) return {std::string(kRootPos), 0};
  const std::string& target = tree.at(t.head).upos;
  int k = 0;
  if (t.head > t.id) {
    for (int j = t.id + 1; j <= t.head; ++j) k += tree.at(j).upos == target ? 1 : 0;
  } else {
    for (int j = t.id - 1; j >= t.head; --j) k -= tree.at(j).upos == target ? 1 : 0;
  }
  return {target, k};
}

}  // namespace

LabelSeq encode(const DepTree& tree, Scheme scheme) {
  if (auto problem = validation_error(tree)) throw TreeError("cannot encode: " + *problem);
  LabelSeq seq;
  seq.scheme = scheme;
  seq.labels.reserve(tree.size());

  std::vector<int> closes, opens;
  if (scheme == Scheme::kBrackets) {
    if (auto crossing = find_crossing_arcs(tree)) {
      const auto& [a, b] = *crossing;
      throw EncodeError("brackets scheme needs a projective tree: arc " + std::to_string(a.head) +
                        "->" + std::to_string(a.dependent) + " crosses arc " +
                        std::to_string(b.head) + "->" + std::to_string(b.dependent));
    }
    closes.assign(tree.size() + 1, 0);
    opens.assign(tree.size() + 1, 0);
    for (const Token& t : tree.tokens) {
      if (t.head > t.id) ++closes[t.head];
      if (t.head != 0 && t.head < t.id) ++opens[t.head];
    }
  }

  for (const Token& t : tree.tokens) {
    SyntaxLabel label;
    label.deprel = t.deprel;
    switch (scheme) {
      case Scheme::kRelOffset:
        label.payload = RelOffsetLabel{t.head == 0 ? 0 : t.head - t.id};
        break;
      case Scheme::kRelPos:
        label.payload = rel_pos_for(tree, t);
        break;
      case Scheme::kBrackets:
        label.payload = BracketLabel{brackets_for(tree, t.id, closes, opens)};
        if (t.head == 0) label.deprel = "root";
        break;
    }
    seq.labels.push_back(std::move(label));
  }
  return seq;
}

LabelSeq emit_multitask_labels(const DepTree& tree, Scheme scheme, Polarity polarity) {
  LabelSeq seq = encode(tree, scheme);
  seq.sentence_polarity = polarity;
  return seq;
}

// ---------------------------------------------------------------------------
// Repair

RepairResult repair(std::span<const int> proposals) {
  if (proposals.empty()) throw std::invalid_argument("repair: empty sentence");
  const int n = static_cast<int>(proposals.size());
  RepairResult result;
  std::vector<int>& heads = result.heads;
  heads.assign(proposals.begin(), proposals.end());
  RepairStats& stats = result.stats;

  for (int i = 1; i <= n; ++i) {
    int& h = heads[i - 1];
    if (h < 0 || h > n || h == i) {
      h = 0;
      ++stats.out_of_range;
    }
  }

  int root = 0;
  for (int i = 1; i <= n; ++i) {
    if (heads[i - 1] != 0) continue;
    if (root == 0) {
      root = i;
    } else {
      heads[i - 1] = root;
      ++stats.extra_roots;
    }
  }
  if (root == 0) {
    root = 1;
    heads[0] = 0;
    ++stats.missing_root;
  }

  // 0 = unseen, 1 = on the current chain, 2 = reaches the root.
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
    if (state[cur] == 1) {
      const auto entry = std::find(chain.begin(), chain.end(), cur);
      const int smallest = *std::min_element(entry, chain.end());
      heads[smallest - 1] = root;
      ++stats.cycles;
    }
    for (int c : chain) state[c] = 2;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Decoding

namespace {

std::vector<int> propose_rel_offset(const LabelSeq& seq) {
  std::vector<int> heads;
  heads.reserve(seq.labels.size());
  for (std::size_t i = 0; i < seq.labels.size(); ++i) {
    const auto* p = std::get_if<RelOffsetLabel>(&seq.labels[i].payload);
    if (!p) {
      heads.push_back(kNoHead);
    } else if (p->offset == 0) {
      heads.push_back(0);
    } else {
      heads.push_back(static_cast<int>(i) + 1 + p->offset);
    }
  }
  return heads;
}

std::vector<int> propose_rel_pos(const LabelSeq& seq, std::span<const Token> words) {
  std::unordered_map<std::string_view, std::vector<int>> positions;
  for (const Token& w : words) positions[w.upos].push_back(w.id);

  std::vector<int> heads;
  heads.reserve(seq.labels.size());
  for (std::size_t i = 0; i < seq.labels.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    const auto* p = std::get_if<RelPosLabel>(&seq.labels[i].payload);
    if (!p) {
      heads.push_back(kNoHead);
      continue;
    }
    if (p->upos == kRootPos) {
      heads.push_back(p->k == 0 ? 0 : kNoHead);
      continue;
    }
    const auto found = positions.find(p->upos);
    if (p->k == 0 || found == positions.end()) {
      heads.push_back(kNoHead);
      continue;
    }
    const std::vector<int>& pos = found->second;
    // Index of the first occurrence strictly right of id.
    const auto right = std::upper_bound(pos.begin(), pos.end(), id) - pos.begin();
    const auto left = std::lower_bound(pos.begin(), pos.end(), id) - pos.begin();
    long idx = p->k > 0 ? right + (p->k - 1) : left + p->k;
    if (idx < 0 || idx >= static_cast<long>(pos.size())) {
      heads.push_back(kNoHead);
    } else {
      heads.push_back(pos[static_cast<std::size_t>(idx)]);
    }
  }
  return heads;
}

std::vector<int> propose_brackets(const LabelSeq& seq, std::size_t& mismatches) {
  const std::size_t n = seq.labels.size();
  std::vector<int> heads(n, kNoHead);
  std::vector<int> left, right;
  auto assign = [&](int dep, int head) {
    int& slot = heads[static_cast<std::size_t>(dep - 1)];
    if (slot == kNoHead) {
      slot = head;
    } else {
      ++mismatches;
    }
  };

  for (std::size_t i = 0; i < n; ++i) {
    const int id = static_cast<int>(i) + 1;
    const auto* p = std::get_if<BracketLabel>(&seq.labels[i].payload);
    if (!p) {
      ++mismatches;
      continue;
    }
    const auto count = [&](char c) { return std::count(p->symbols.begin(), p->symbols.end(), c); };
    const long closes = count('\\');
    const long lt = count('<');
    const long gt = count('>');
    const long opens = count('/');

    for (long c = 0; c < closes; ++c) {
      if (left.empty()) {
        ++mismatches;
        continue;
      }
      assign(left.back(), id);
      left.pop_back();
    }
    if (lt > 0) left.push_back(id);
    if (gt > 0) {
      if (right.empty()) {
        ++mismatches;
      } else {
        assign(id, right.back());
        right.pop_back();
      }
    }
    mismatches += static_cast<std::size_t>(std::max(0L, lt - 1) + std::max(0L, gt - 1));
    right.insert(right.end(), static_cast<std::size_t>(opens), id);
  }
  mismatches += left.size() + right.size();

  // Words never given a head are root candidates.
  for (int& h : heads) {
    if (h == kNoHead) h = 0;
  }
  return heads;
}

}  // namespace

DecodeResult decode(const LabelSeq& seq, std::span<const Token> words) {
  if (seq.labels.empty()) throw std::invalid_argument("decode: empty label sequence");
  if (seq.labels.size() != words.size()) {
    throw std::invalid_argument("decode: " + std::to_string(seq.labels.size()) +
                                " labels for " + std::to_string(words.size()) + " words");
  }
  std::vector<int> proposals;
  std::size_t bracket_mismatches = 0;
  switch (seq.scheme) {
    case Scheme::kRelOffset:
      proposals = propose_rel_offset(seq);
      break;
    case Scheme::kRelPos:
      proposals = propose_rel_pos(seq, words);
      break;
    case Scheme::kBrackets:
      proposals = propose_brackets(seq, bracket_mismatches);
      break;
  }

  RepairResult fixed = repair(proposals);
  DecodeResult out;
  out.repairs = fixed.stats;
  out.repairs.bracket_mismatches += bracket_mismatches;
  out.tree.tokens.reserve(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    Token t = words[i];
    t.id = static_cast<int>(i) + 1;
    t.head = fixed.heads[i];
    t.deprel = seq.labels[i].deprel;
    out.tree.tokens.push_back(std::move(t));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Label spelling

namespace {

std::string signed_int(int v) {
  if (v > 0) return "+" + std::to_string(v);
  return std::to_string(v);
}

int parse_signed(std::string_view s, std::string_view what) {
  int v = 0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (s.empty() || ec != std::errc() || ptr != last) {
    throw LabelFormatError("bad " + std::string(what) + " '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

std::string format_label(const SyntaxLabel& label) {
  std::string payload;
  if (const auto* o = std::get_if<RelOffsetLabel>(&label.payload)) {
    payload = signed_int(o->offset);
  } else if (const auto* p = std::get_if<RelPosLabel>(&label.payload)) {
    payload = p->upos + "," + signed_int(p->k);
  } else {
    payload = std::get<BracketLabel>(label.payload).symbols;
  }
  return payload + ":" + label.deprel;
}

SyntaxLabel parse_label(std::string_view text, Scheme scheme) {
  const std::size_t colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw LabelFormatError("label '" + std::string(text) + "' has no ':deprel' part");
  }
  const std::string_view payload = text.substr(0, colon);
  SyntaxLabel label;
  label.deprel = text.substr(colon + 1);
  if (label.deprel.empty()) throw LabelFormatError("label '" + std::string(text) + "' has empty deprel");
  switch (scheme) {
    case Scheme::kRelOffset:
      label.payload = RelOffsetLabel{parse_signed(payload, "offset")};
      break;
    case Scheme::kRelPos: {
      const std::size_t comma = payload.rfind(',');
      if (comma == std::string_view::npos || comma == 0) {
        throw LabelFormatError("bad rel-pos payload '" + std::string(payload) + "'");
      }
      label.payload =
          RelPosLabel{std::string(payload.substr(0, comma)), parse_signed(payload.substr(comma + 1), "k")};
      break;
    }
    case Scheme::kBrackets:
      if (payload.find_first_not_of("\\<>/") != std::string_view::npos) {
        throw LabelFormatError("bad bracket payload '" + std::string(payload) + "'");
      }
      label.payload = BracketLabel{std::string(payload)};
      break;
  }
  return label;
}

// ---------------------------------------------------------------------------
// Tagger-bridge lines

namespace {

void append_escaped(std::string& out, std::string_view form) {
  for (char c : form) {
    switch (c) {
      case '\\':
        out += "\\\\";
        break;
      case '/':
        out += "\\/";
        break;
      case ' ':
        out += "\\s";
        break;
      default:
        out += c;
    }
  }
}

}  // namespace

std::string format_bridge_line(const DepTree& tree, const LabelSeq& labels) {
  if (labels.labels.size() != tree.size()) {
    throw std::invalid_argument("format_bridge_line: label count does not match sentence length");
  }
  std::string line = tree.sentence_id.empty() ? std::string("_") : tree.sentence_id;
  line += '\t';
  for (std::size_t i = 0; i < tree.size(); ++i) {
    if (i > 0) line += ' ';
    append_escaped(line, tree.tokens[i].form);
    line += '/';
    line += tree.tokens[i].upos;
    line += '/';
    line += format_label(labels.labels[i]);
  }
  if (labels.sentence_polarity) {
    line += '@';
    line += to_string(*labels.sentence_polarity);
  }
  return line;
}

BridgeRecord parse_bridge_line(std::string_view line, Scheme scheme) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  const std::size_t tab = line.find('\t');
  if (tab == std::string_view::npos) throw LabelFormatError("missing TAB after sentence id");
  BridgeRecord rec;
  rec.sentence_id = line.substr(0, tab);
  if (rec.sentence_id == "_") rec.sentence_id.clear();
  rec.labels.scheme = scheme;

  std::string_view rest = line.substr(tab + 1);
  if (rest.empty()) throw LabelFormatError("record has no words");
  std::size_t pos = 0;
  while (pos <= rest.size()) {
    // Form, with escapes, up to the first unescaped '/'.
    std::string form;
    bool closed = false;
    while (pos < rest.size()) {
      const char c = rest[pos++];
      if (c == '\\') {
        if (pos >= rest.size()) throw LabelFormatError("dangling escape in form");
        const char e = rest[pos++];
        if (e == 's') {
          form += ' ';
        } else if (e == '/' || e == '\\') {
          form += e;
        } else {
          throw LabelFormatError(std::string("unknown escape '\\") + e + "' in form");
        }
      } else if (c == '/') {
        closed = true;
        break;
      } else if (c == ' ') {
        throw LabelFormatError("word '" + form + "' is missing its upos and label");
      } else {
        form += c;
      }
    }
    if (!closed || form.empty()) throw LabelFormatError("word " + std::to_string(rec.words.size() + 1) + " is malformed");

    const std::size_t slash = rest.find('/', pos);
    const std::size_t space = rest.find(' ', pos);
    if (slash == std::string_view::npos || slash > space) {
      throw LabelFormatError("word '" + form + "' is missing its label");
    }
    const std::string_view upos = rest.substr(pos, slash - pos);
    if (upos.empty()) throw LabelFormatError("word '" + form + "' has empty upos");
    const std::size_t end = space == std::string_view::npos ? rest.size() : space;
    std::string_view label_text = rest.substr(slash + 1, end - slash - 1);
    const bool last = end == rest.size();

    const std::size_t at = label_text.rfind('@');
    if (at != std::string_view::npos) {
      if (!last) throw LabelFormatError("'@class' is only allowed on the last label");
      const auto polarity = parse_polarity(label_text.substr(at + 1));
      if (!polarity) {
        throw LabelFormatError("unknown sentence class '" + std::string(label_text.substr(at + 1)) + "'");
      }
      rec.labels.sentence_polarity = polarity;
      label_text = label_text.substr(0, at);
    }

    Token w;
    w.id = static_cast<int>(rec.words.size()) + 1;
    w.form = std::move(form);
    w.lemma = "_";
    w.upos = upos;
    rec.words.push_back(std::move(w));
    rec.labels.labels.push_back(parse_label(label_text, scheme));

    if (last) break;
    pos = end + 1;
  }
  return rec;
}

TaggerOutputReader::TaggerOutputReader(std::istream& in, Scheme scheme, ErrorPolicy policy)
    : in_(in), scheme_(scheme), policy_(policy) {}

std::optional<TaggedSentence> TaggerOutputReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++ordinal_;
    try {
      BridgeRecord rec = parse_bridge_line(line, scheme_);
      DecodeResult decoded = decode(rec.labels, rec.words);
      decoded.tree.sentence_id = rec.sentence_id;
      if (!rec.sentence_id.empty()) decoded.tree.comments.push_back(" sent_id = " + rec.sentence_id);
      repairs_ += decoded.repairs;
      return TaggedSentence{std::move(rec.labels), std::move(decoded.tree), decoded.repairs};
    } catch (const LabelFormatError& e) {
      RecordError error{ordinal_, line_no_, e.what()};
      if (policy_ == ErrorPolicy::kAbort) throw DataError(error);
      errors_.push_back(std::move(error));
    }
  }
  return std::nullopt;
}

std::vector<TaggedSentence> parse_tagger_output(std::istream& in, Scheme scheme,
                                                ErrorPolicy policy,
                                                std::vector<RecordError>* errors) {
  TaggerOutputReader reader(in, scheme, policy);
  std::vector<TaggedSentence> out;
  while (auto s = reader.next()) out.push_back(std::move(*s));
  if (errors) *errors = reader.errors();
  return out;
}

}  // namespace salsa
