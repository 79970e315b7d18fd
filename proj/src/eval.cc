#include "salsa/eval.h"

#include <istream>
#include <map>
#include <unordered_map>

#include "json.hpp"

namespace salsa {

namespace {

using nlohmann::json;

std::size_t codepoint_length(std::string_view s) {
  std::size_t n = 0;
  for (char c : s) n += (static_cast<unsigned char>(c) & 0xC0) != 0x80 ? 1 : 0;
  return n;
}

struct GoldToken {
  Word word;
  long start = -1;
  long end = -1;
};

long get_offset(const json& tok, const char* key) {
  const auto it = tok.find(key);
  if (it == tok.end() || it->is_null()) return -1;
  if (!it->is_number_integer()) throw EvalError(std::string("token '") + key + "' must be an integer");
  return it->get<long>();
}

// Fills missing offsets by locating each form in the text, left to right.
void locate_tokens(std::vector<GoldToken>& toks, const std::string& text) {
  std::size_t cursor = 0;
  for (GoldToken& t : toks) {
    if (t.start >= 0 && t.end >= 0) continue;
    const std::size_t at = text.find(t.word.form, cursor);
    if (at == std::string::npos) {
      throw EvalError("token '" + t.word.form + "' has no offsets and does not occur in the text");
    }
    t.start = static_cast<long>(codepoint_length(std::string_view(text).substr(0, at)));
    t.end = t.start + static_cast<long>(codepoint_length(t.word.form));
    cursor = at + t.word.form.size();
  }
}

TokenSpan resolve_span(const json& value, const std::vector<GoldToken>& toks, long text_length,
                       const char* what) {
  if (!value.is_array() || value.size() != 2 || !value[0].is_number_integer() ||
      !value[1].is_number_integer()) {
    throw EvalError(std::string(what) + " must be a [start, end] pair");
  }
  const long s = value[0].get<long>();
  const long e = value[1].get<long>();
  if (s < 0 || e > text_length || s >= e) {
    throw EvalError(std::string(what) + " span [" + std::to_string(s) + ", " + std::to_string(e) +
                    ") out of bounds");
  }
  TokenSpan span{0, 0};
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (toks[i].start < e && toks[i].end > s) {
      if (span.first == 0) span.first = static_cast<int>(i) + 1;
      span.last = static_cast<int>(i) + 1;
    }
  }
  if (span.first == 0) {
    throw EvalError(std::string(what) + " span [" + std::to_string(s) + ", " + std::to_string(e) +
                    ") covers no token");
  }
  return span;
}

std::optional<TokenSpan> optional_span(const json& op, const char* key,
                                       const std::vector<GoldToken>& toks, long text_length) {
  const auto it = op.find(key);
  if (it == op.end() || it->is_null()) return std::nullopt;
  return resolve_span(*it, toks, text_length, key);
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

}  // namespace

GoldRecord parse_gold_record(const std::string& json_line) {
  const json j = json::parse(json_line);
  if (!j.is_object()) throw EvalError("record is not a JSON object");
  GoldRecord rec;
  const auto id = j.find("sent_id");
  if (id == j.end() || !id->is_string()) throw EvalError("missing required field 'sent_id'");
  rec.sentence_id = id->get<std::string>();
  try {
    if (auto it = j.find("text"); it != j.end() && it->is_string()) rec.text = it->get<std::string>();
    const auto tokens = j.find("tokens");
    if (tokens == j.end() || !tokens->is_array() || tokens->empty()) {
      throw EvalError("missing required field 'tokens'");
    }
    std::vector<GoldToken> toks;
    for (const json& tok : *tokens) {
      if (!tok.is_object() || !tok.contains("form") || !tok["form"].is_string()) {
        throw EvalError("every token needs a 'form'");
      }
      GoldToken t;
      t.word.form = tok["form"].get<std::string>();
      t.word.upos = tok.contains("upos") && tok["upos"].is_string() ? tok["upos"].get<std::string>() : "X";
      t.start = get_offset(tok, "start");
      t.end = get_offset(tok, "end");
      toks.push_back(std::move(t));
    }
    locate_tokens(toks, rec.text);
    long text_length = static_cast<long>(codepoint_length(rec.text));
    for (const GoldToken& t : toks) text_length = std::max(text_length, t.end);

    rec.gold_opinions.sentence_id = rec.sentence_id;
    for (const GoldToken& t : toks) rec.gold_opinions.words.push_back(t.word);

    if (auto it = j.find("class"); it != j.end() && !it->is_null()) {
      const auto p = it->is_string() ? parse_polarity(it->get<std::string>()) : std::nullopt;
      if (!p) throw EvalError("unknown class " + it->dump());
      rec.gold_class = p;
    }
    if (auto it = j.find("opinions"); it != j.end() && !it->is_null()) {
      if (!it->is_array()) throw EvalError("'opinions' must be an array");
      rec.has_opinions = true;
      for (const json& op : *it) {
        if (!op.is_object() || !op.contains("expression")) throw EvalError("opinion without 'expression'");
        Opinion o;
        o.expression = resolve_span(op["expression"], toks, text_length, "expression");
        o.target = optional_span(op, "target", toks, text_length);
        o.holder = optional_span(op, "holder", toks, text_length);
        const auto pol = op.contains("polarity") && op["polarity"].is_string()
                             ? parse_polarity(op["polarity"].get<std::string>())
                             : std::nullopt;
        if (!pol) throw EvalError("opinion without a valid 'polarity'");
        o.polarity = *pol;
        rec.gold_opinions.opinions.push_back(o);
      }
    }
    if (!rec.gold_class && !rec.has_opinions) {
      throw EvalError("missing required fields: need 'class' or 'opinions'");
    }
    if (auto it = j.find("parse"); it != j.end() && !it->is_null()) {
      const json& heads = (*it)["heads"];
      const json& deprels = (*it)["deprels"];
      if (!heads.is_array() || !deprels.is_array() || heads.size() != toks.size() ||
          deprels.size() != toks.size()) {
        throw EvalError("'parse' needs heads and deprels for every token");
      }
      DepTree tree;
      tree.sentence_id = rec.sentence_id;
      for (std::size_t i = 0; i < toks.size(); ++i) {
        if (!heads[i].is_number_integer() || !deprels[i].is_string()) {
          throw EvalError("malformed parse entry at token " + std::to_string(i + 1));
        }
        tree.tokens.push_back({static_cast<int>(i) + 1, toks[i].word.form, "_", toks[i].word.upos,
                               heads[i].get<int>(), deprels[i].get<std::string>()});
      }
      if (auto problem = validation_error(tree)) throw EvalError("invalid gold parse: " + *problem);
      rec.parse = std::move(tree);
    }
  } catch (const EvalError& e) {
    throw EvalError("record '" + rec.sentence_id + "': " + e.what());
  } catch (const json::exception& e) {
    throw EvalError("record '" + rec.sentence_id + "': " + e.what());
  }
  return rec;
}

GoldReader::GoldReader(std::istream& in, ErrorPolicy policy) : in_(in), policy_(policy) {}

std::optional<GoldRecord> GoldReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    const std::size_t line_start = byte_offset_;
    byte_offset_ += line.size() + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    ++ordinal_;
    RecordError error{ordinal_, line_no_, ""};
    try {
      return parse_gold_record(line);
    } catch (const json::parse_error& e) {
      const std::size_t at = line_start + (e.byte > 0 ? e.byte - 1 : 0);
      error.message = "malformed JSON at byte offset " + std::to_string(at) + ": " + e.what();
    } catch (const EvalError& e) {
      error.message = e.what();
    }
    if (policy_ == ErrorPolicy::kAbort) throw DataError(error);
    errors_.push_back(std::move(error));
  }
  return std::nullopt;
}

std::vector<GoldRecord> load_gold(std::istream& in, ErrorPolicy policy,
                                  std::vector<RecordError>* errors) {
  GoldReader reader(in, policy);
  std::vector<GoldRecord> out;
  while (auto r = reader.next()) out.push_back(std::move(*r));
  if (errors) *errors = reader.errors();
  return out;
}

// ---------------------------------------------------------------------------
// Sentence polarity

void SentenceAccumulator::add(Polarity pred, Polarity gold) {
  ++confusion_[static_cast<std::size_t>(gold)][static_cast<std::size_t>(pred)];
}

void SentenceAccumulator::merge(const SentenceAccumulator& other) {
  for (std::size_t g = 0; g < 3; ++g) {
    for (std::size_t p = 0; p < 3; ++p) confusion_[g][p] += other.confusion_[g][p];
  }
}

SentenceMetrics SentenceAccumulator::metrics() const {
  SentenceMetrics m;
  std::size_t correct = 0;
  for (std::size_t c = 0; c < 3; ++c) {
    correct += confusion_[c][c];
    std::size_t gold_c = 0, pred_c = 0;
    for (std::size_t o = 0; o < 3; ++o) {
      gold_c += confusion_[c][o];
      pred_c += confusion_[o][c];
      m.count += confusion_[c][o];
    }
    ClassScores& s = m.per_class[c];
    s.support = gold_c;
    s.precision = ratio(confusion_[c][c], pred_c);
    s.recall = ratio(confusion_[c][c], gold_c);
    s.f1 = harmonic(s.precision, s.recall);
    m.macro_f1 += s.f1 / 3.0;
  }
  m.accuracy = ratio(correct, m.count);
  return m;
}

SentenceMetrics eval_sentences(std::span<const Polarity> pred, std::span<const Polarity> gold) {
  if (pred.size() != gold.size()) {
    throw EvalError("eval_sentences: " + std::to_string(pred.size()) + " predictions for " +
                    std::to_string(gold.size()) + " gold labels");
  }
  SentenceAccumulator acc;
  for (std::size_t i = 0; i < pred.size(); ++i) acc.add(pred[i], gold[i]);
  return acc.metrics();
}

// ---------------------------------------------------------------------------
// Targets

void TargetAccumulator::add(const OpinionSet& pred, const OpinionSet& gold, MatchMode mode) {
  struct Item {
    TokenSpan span;
    Polarity polarity;
  };
  auto collect = [](const OpinionSet& os) {
    std::vector<Item> items;
    for (const Opinion& op : os.opinions) {
      if (op.target) items.push_back({*op.target, op.polarity});
    }
    return items;
  };
  const std::vector<Item> p = collect(pred);
  const std::vector<Item> g = collect(gold);
  std::vector<bool> p_used(p.size(), false), g_used(g.size(), false);
  auto pass = [&](auto&& compatible) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p_used[i]) continue;
      for (std::size_t k = 0; k < g.size(); ++k) {
        if (g_used[k] || p[i].polarity != g[k].polarity || !compatible(p[i].span, g[k].span)) continue;
        p_used[i] = g_used[k] = true;
        ++matched_;
        break;
      }
    }
  };
  pass([](const TokenSpan& a, const TokenSpan& b) { return a == b; });
  if (mode == MatchMode::kOverlap) {
    pass([](const TokenSpan& a, const TokenSpan& b) { return a.overlaps(b); });
  }
  predicted_ += p.size();
  gold_ += g.size();
}

void TargetAccumulator::merge(const TargetAccumulator& other) {
  matched_ += other.matched_;
  predicted_ += other.predicted_;
  gold_ += other.gold_;
}

TargetMetrics TargetAccumulator::metrics() const {
  TargetMetrics m;
  m.matched = matched_;
  m.predicted = predicted_;
  m.gold = gold_;
  m.precision = ratio(matched_, predicted_);
  m.recall = ratio(matched_, gold_);
  m.f1 = harmonic(m.precision, m.recall);
  return m;
}

TargetMetrics eval_targets(std::span<const OpinionSet> pred, std::span<const OpinionSet> gold,
                           MatchMode mode) {
  std::unordered_map<std::string, std::size_t> gold_index;
  for (std::size_t i = 0; i < gold.size(); ++i) gold_index[gold[i].sentence_id] = i;
  std::vector<bool> seen(gold.size(), false);
  TargetAccumulator acc;
  for (const OpinionSet& p : pred) {
    const auto it = gold_index.find(p.sentence_id);
    if (it == gold_index.end()) throw EvalError("prediction for unknown sentence '" + p.sentence_id + "'");
    seen[it->second] = true;
    acc.add(p, gold[it->second], mode);
  }
  const OpinionSet empty;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (!seen[i]) acc.add(empty, gold[i], mode);
  }
  return acc.metrics();
}

// ---------------------------------------------------------------------------
// Parsing

void ParseAccumulator::add(const DepTree& pred, const DepTree& gold) {
  if (pred.size() != gold.size()) {
    throw EvalError("sentence '" + gold.sentence_id + "': " + std::to_string(pred.size()) +
                    " predicted tokens vs " + std::to_string(gold.size()) + " gold tokens");
  }
  for (std::size_t i = 0; i < gold.size(); ++i) {
    ++tokens_;
    if (pred.tokens[i].head != gold.tokens[i].head) continue;
    ++heads_;
    if (pred.tokens[i].deprel == gold.tokens[i].deprel) ++labeled_;
  }
}

void ParseAccumulator::merge(const ParseAccumulator& other) {
  tokens_ += other.tokens_;
  heads_ += other.heads_;
  labeled_ += other.labeled_;
}

ParseMetrics ParseAccumulator::metrics() const {
  return {ratio(heads_, tokens_), ratio(labeled_, tokens_), tokens_};
}

ParseMetrics eval_parse(std::span<const DepTree> pred, std::span<const DepTree> gold) {
  if (pred.size() != gold.size()) {
    throw EvalError("eval_parse: " + std::to_string(pred.size()) + " predicted trees for " +
                    std::to_string(gold.size()) + " gold trees");
  }
  ParseAccumulator acc;
  for (std::size_t i = 0; i < pred.size(); ++i) acc.add(pred[i], gold[i]);
  return acc.metrics();
}

// ---------------------------------------------------------------------------
// Reporting

namespace {

nlohmann::ordered_json target_json(const TargetMetrics& m) {
  return {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1},
          {"matched", m.matched},     {"predicted", m.predicted}, {"gold", m.gold}};
}

}  // namespace

std::string metrics_to_json(const MetricsReport& report, int indent) {
  nlohmann::ordered_json j;
  if (report.sentence) {
    const SentenceMetrics& s = *report.sentence;
    nlohmann::ordered_json per_class;
    for (Polarity p : kAllPolarities) {
      const ClassScores& c = s.of(p);
      per_class[std::string(to_string(p))] = {
          {"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1}, {"support", c.support}};
    }
    j["sentence"] = {{"accuracy", s.accuracy}, {"macro_f1", s.macro_f1}, {"per_class", per_class},
                     {"count", s.count}};
  }
  if (report.targets_exact || report.targets_overlap) {
    nlohmann::ordered_json t;
    if (report.targets_exact) t["exact"] = target_json(*report.targets_exact);
    if (report.targets_overlap) t["overlap"] = target_json(*report.targets_overlap);
    j["targets"] = t;
  }
  if (report.parse) {
    j["parse"] = {{"uas", report.parse->uas}, {"las", report.parse->las}, {"tokens", report.parse->tokens}};
  }
  j["counts"] = {{"sentences", report.sentences},
                 {"opinions", report.opinions},
                 {"conversion_coverage", report.conversion_coverage}};
  return j.dump(indent);
}

}  // namespace salsa
