#include "salsa/rules.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>

namespace salsa {

void RuleConfig::validate() const {
  if (!(neutral_threshold >= 0.0)) throw std::invalid_argument("neutral_threshold must be >= 0");
  if (!(adversative_before >= 0.0) || !(adversative_after >= 0.0)) {
    throw std::invalid_argument("adversative_weights must be >= 0");
  }
  if (!(negation_cap > 0.0 && negation_cap <= kMaxValence)) {
    throw std::invalid_argument("negation_cap must be in (0, 5]");
  }
  if (!(negation_shift >= 0.0)) throw std::invalid_argument("negation_shift must be >= 0");
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view s, const std::string& key) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("bad number for " + key + ": '" + std::string(s) + "'");
  }
  return v;
}

std::string_view base_relation(std::string_view deprel) { return deprel.substr(0, deprel.find(':')); }

bool is_nominal(const Token& t) { return t.upos == "NOUN" || t.upos == "PROPN"; }

}  // namespace

RuleConfig load_rule_config(std::istream& in) {
  RuleConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const std::size_t eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(trim(text.substr(0, eq)));
    const std::string_view value = trim(text.substr(eq + 1));
    if (key == "negation_shift") {
      cfg.negation_shift = parse_number(value, key);
    } else if (key == "negation_cap") {
      cfg.negation_cap = parse_number(value, key);
    } else if (key == "neutral_threshold") {
      cfg.neutral_threshold = parse_number(value, key);
    } else if (key == "adversative_weights") {
      std::string_view v = value;
      if (!v.empty() && v.front() == '(' && v.back() == ')') v = v.substr(1, v.size() - 2);
      const std::size_t comma = v.find(',');
      if (comma == std::string_view::npos) {
        throw std::invalid_argument("adversative_weights needs two values: before, after");
      }
      cfg.adversative_before = parse_number(v.substr(0, comma), key);
      cfg.adversative_after = parse_number(v.substr(comma + 1), key);
    } else if (key == "negation_scope") {
      if (value != "HEAD_SUBTREE") {
        throw std::invalid_argument("unsupported negation_scope '" + std::string(value) + "'");
      }
      cfg.negation_scope = NegationScope::kHeadSubtree;
    } else {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

RuleConfig load_rule_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open rule config '" + path + "'");
  return load_rule_config(in);
}

std::string_view to_string(Rule rule) {
  switch (rule) {
    case Rule::kLexicon:
      return "LEXICON";
    case Rule::kIntensify:
      return "INTENSIFY";
    case Rule::kNegate:
      return "NEGATE";
    case Rule::kAdversative:
      return "ADVERSATIVE";
    case Rule::kAggregate:
      return "AGGREGATE";
  }
  return "AGGREGATE";
}

double replay_trace(std::span<const TraceStep> trace) {
  double total = 0.0;
  for (const TraceStep& step : trace) {
    if (step.rule == Rule::kAdversative || step.rule == Rule::kAggregate) {
      total = step.after;
    } else {
      total += step.after - step.before;
    }
  }
  return total;
}

std::vector<std::string> effective_lemmas(const DepTree& tree, const PolarityLexicon& lex) {
  std::vector<std::string> lemmas;
  lemmas.reserve(tree.size());
  for (const Token& t : tree.tokens) {
    lemmas.push_back(lowercase(t.lemma.empty() || t.lemma == "_" ? t.form : t.lemma));
  }
  const CollocationTable& table = lex.collocations();
  if (table.empty()) return lemmas;
  for (std::size_t i = 0; i + 1 < lemmas.size(); ++i) {
    auto it = table.find({lemmas[i], lemmas[i + 1]});
    if (it == table.end()) {
      it = table.find({lowercase(tree.tokens[i].form), lowercase(tree.tokens[i + 1].form)});
    }
    if (it == table.end()) continue;
    // The merged lemma lives on whichever token heads the pair.
    const bool second_heads = tree.tokens[i].head == tree.tokens[i + 1].id;
    lemmas[second_heads ? i + 1 : i] = it->second;
    lemmas[second_heads ? i : i + 1].clear();
    ++i;
  }
  return lemmas;
}

namespace {

// Lexical facts shared by sentence and target scoring.
struct TokenFacts {
  std::vector<std::string> lemmas;
  std::vector<Shifter> shifters;  // index = id - 1
  std::vector<double> base;       // lexicon valence, 0 for shifters and misses
  std::vector<std::vector<int>> kids;

  TokenFacts(const DepTree& tree, const PolarityLexicon& lex)
      : lemmas(effective_lemmas(tree, lex)), kids(children_of(tree)) {
    shifters.resize(tree.size());
    base.assign(tree.size(), 0.0);
    for (std::size_t i = 0; i < tree.size(); ++i) {
      if (lemmas[i].empty()) continue;
      shifters[i] = lex.classify_shifter(lemmas[i]);
      if (shifters[i].kind == Shifter::Kind::kNone) {
        base[i] = lex.lookup(lemmas[i], tree.tokens[i].upos).value_or(0.0);
      }
    }
  }

  Shifter::Kind kind(int id) const { return shifters[static_cast<std::size_t>(id - 1)].kind; }
  const std::string& lemma(int id) const { return lemmas[static_cast<std::size_t>(id - 1)]; }
};

double negate(double v, const RuleConfig& cfg) {
  const double sign = v > 0 ? 1.0 : -1.0;
  return std::clamp(v - sign * cfg.negation_shift, -cfg.negation_cap, cfg.negation_cap);
}

std::string factor_note(const std::string& lemma, double strength) {
  std::string s = std::to_string(1.0 + strength);
  while (s.size() > 1 && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return lemma + " x" + s;
}

// Lexicon value of `id` scaled by its intensifier dependents. Appends steps.
double composed_node_valence(int id, const TokenFacts& facts, std::vector<TraceStep>& trace) {
  double v = facts.base[static_cast<std::size_t>(id - 1)];
  if (v != 0.0) trace.push_back({id, Rule::kLexicon, 0.0, v, facts.lemma(id)});
  for (int c : facts.kids[static_cast<std::size_t>(id)]) {
    if (facts.kind(c) != Shifter::Kind::kIntensifier) continue;
    const double s = facts.shifters[static_cast<std::size_t>(c - 1)].strength;
    std::string note = factor_note(facts.lemma(c), s);
    if (v == 0.0) note += " (vacuous)";
    trace.push_back({id, Rule::kIntensify, v, v * (1.0 + s), std::move(note)});
    v *= 1.0 + s;
  }
  return v;
}

// Applies each negator dependent of `id` to `v`. Appends steps.
double apply_negators(int id, double v, const TokenFacts& facts, const RuleConfig& cfg,
                      std::vector<TraceStep>& trace) {
  for (int c : facts.kids[static_cast<std::size_t>(id)]) {
    if (facts.kind(c) != Shifter::Kind::kNegator) continue;
    if (v == 0.0) {
      trace.push_back({id, Rule::kNegate, 0.0, 0.0, facts.lemma(c) + " (vacuous)"});
      continue;
    }
    const double after = negate(v, cfg);
    trace.push_back({id, Rule::kNegate, v, after, facts.lemma(c)});
    v = after;
  }
  return v;
}

}  // namespace

TreeScore score_tree(const DepTree& tree, const PolarityLexicon& lex, const RuleConfig& cfg) {
  TreeScore out;
  const int root = tree.root();
  if (tree.size() == 0 || root == 0) {
    out.trace.push_back({0, Rule::kAggregate, 0.0, 0.0, "sentence"});
    return out;
  }
  const TokenFacts facts(tree, lex);

  int marker = 0;
  for (const Token& t : tree.tokens) {
    if (facts.kind(t.id) == Shifter::Kind::kAdversative) marker = t.id;
  }

  std::vector<double> subtree(tree.size() + 1, 0.0);
  double total = 0.0;
  double before_marker = 0.0;
  double after_marker = 0.0;

  // Iterative post-order, children in id order.
  std::vector<std::pair<int, std::size_t>> stack{{root, 0}};
  while (!stack.empty()) {
    auto& [v, next_child] = stack.back();
    const auto& kids = facts.kids[static_cast<std::size_t>(v)];
    if (next_child < kids.size()) {
      const int c = kids[next_child++];
      stack.push_back({c, 0});
      continue;
    }
    const int node = v;
    stack.pop_back();

    const std::size_t first_step = out.trace.size();
    double value = composed_node_valence(node, facts, out.trace);
    for (int c : kids) value += subtree[static_cast<std::size_t>(c)];
    value = apply_negators(node, value, facts, cfg, out.trace);
    subtree[static_cast<std::size_t>(node)] = value;

    for (std::size_t s = first_step; s < out.trace.size(); ++s) {
      const double delta = out.trace[s].after - out.trace[s].before;
      total += delta;
      (marker != 0 && node < marker ? before_marker : after_marker) += delta;
    }
  }

  if (marker != 0) {
    const double weighted = cfg.adversative_before * before_marker + cfg.adversative_after * after_marker;
    out.trace.push_back({marker, Rule::kAdversative, total, weighted,
                         facts.lemma(marker) + ": before " + std::to_string(before_marker) +
                             ", after " + std::to_string(after_marker)});
    total = weighted;
  }
  out.trace.push_back({root, Rule::kAggregate, total, total, "sentence"});
  out.valence = total;
  return out;
}

SentimentResult classify_sentence(const DepTree& tree, const PolarityLexicon& lex,
                                  const RuleConfig& cfg) {
  TreeScore score = score_tree(tree, lex, cfg);
  SentimentResult result;
  result.valence = score.valence;
  result.polarity = classify_valence(score.valence, cfg.neutral_threshold);
  result.trace = std::move(score.trace);
  return result;
}

std::vector<TargetCandidate> extract_targets(const DepTree& tree) {
  std::vector<TargetCandidate> out;
  const int n = static_cast<int>(tree.size());
  auto in_subtree = [&tree](int id, int head) {
    for (int cur = id; cur != 0; cur = tree.at(cur).head) {
      if (cur == head) return true;
    }
    return false;
  };
  auto span_material = [&tree](int id) {
    const std::string_view rel = base_relation(tree.at(id).deprel);
    return rel == "compound" || rel == "flat" || rel == "amod";
  };

  for (const Token& t : tree.tokens) {
    if (!is_nominal(t)) continue;
    const std::string_view rel = base_relation(t.deprel);
    if ((rel == "compound" || rel == "flat") && t.head != 0 && is_nominal(tree.at(t.head))) continue;
    TargetCandidate cand{{t.id, t.id}, t.id};
    while (cand.span.first > 1 && span_material(cand.span.first - 1) &&
           in_subtree(cand.span.first - 1, t.id)) {
      --cand.span.first;
    }
    while (cand.span.last < n && span_material(cand.span.last + 1) &&
           in_subtree(cand.span.last + 1, t.id)) {
      ++cand.span.last;
    }
    out.push_back(cand);
  }
  return out;
}

namespace {
TargetOpinion score_candidate(const DepTree& tree, const TokenFacts& facts, const RuleConfig& cfg,
                              const TargetCandidate& cand);
}  // namespace

TargetOpinion score_target(const DepTree& tree, const PolarityLexicon& lex, const RuleConfig& cfg,
                           const TokenSpan& target) {
  const auto candidates = extract_targets(tree);
  const auto found = std::find_if(candidates.begin(), candidates.end(),
                                  [&](const TargetCandidate& c) { return c.span == target; });
  if (found == candidates.end()) {
    throw TargetError("span [" + std::to_string(target.first) + ", " + std::to_string(target.last) +
                      "] is not a target candidate of this tree");
  }
  return score_candidate(tree, TokenFacts(tree, lex), cfg, *found);
}

namespace {

TargetOpinion score_candidate(const DepTree& tree, const TokenFacts& facts, const RuleConfig& cfg,
                              const TargetCandidate& cand) {
  const int head = cand.head;
  const TokenSpan& target = cand.span;
  const Token& h = tree.at(head);

  std::vector<int> candidates_in_order;
  // Adjectival or participial modifiers of the target.
  for (int c : facts.kids[static_cast<std::size_t>(head)]) {
    const Token& k = tree.at(c);
    const std::string_view rel = base_relation(k.deprel);
    if (rel == "amod" || (rel == "acl" && (k.upos == "VERB" || k.upos == "ADJ"))) {
      candidates_in_order.push_back(c);
    }
  }
  const std::string_view rel = base_relation(h.deprel);
  if (h.head != 0) {
    const Token& gov = tree.at(h.head);
    // Subject of a copular or adjectival predicate.
    if (rel == "nsubj") {
      bool copular = gov.upos == "ADJ";
      for (int c : facts.kids[static_cast<std::size_t>(gov.id)]) {
        copular = copular || base_relation(tree.at(c).deprel) == "cop";
      }
      if (copular) candidates_in_order.push_back(gov.id);
    }
    // Core argument of a verb.
    if ((rel == "obj" || rel == "iobj" || rel == "obl") && gov.upos == "VERB") {
      candidates_in_order.push_back(gov.id);
    }
  }

  TargetOpinion op;
  op.target = target;
  for (int id = target.first; id <= target.last; ++id) {
    if (!op.target_text.empty()) op.target_text += ' ';
    op.target_text += tree.at(id).form;
  }
  double total = 0.0;
  for (int e : candidates_in_order) {
    if (facts.base[static_cast<std::size_t>(e - 1)] == 0.0) continue;
    if (std::find(op.evidence.begin(), op.evidence.end(), e) != op.evidence.end()) continue;
    const std::size_t first_step = op.trace.size();
    const double v = composed_node_valence(e, facts, op.trace);
    apply_negators(e, v, facts, cfg, op.trace);
    for (std::size_t s = first_step; s < op.trace.size(); ++s) {
      total += op.trace[s].after - op.trace[s].before;
    }
    op.evidence.push_back(e);
  }
  op.trace.push_back({head, Rule::kAggregate, total, total, "target " + op.target_text});
  op.valence = total;
  op.polarity = classify_valence(total, cfg.neutral_threshold);
  return op;
}

}  // namespace

SentimentResult analyze(const DepTree& tree, const PolarityLexicon& lex, const RuleConfig& cfg) {
  SentimentResult result = classify_sentence(tree, lex, cfg);
  const auto candidates = extract_targets(tree);
  if (candidates.empty()) return result;
  const TokenFacts facts(tree, lex);
  for (const TargetCandidate& cand : candidates) {
    TargetOpinion op = score_candidate(tree, facts, cfg, cand);
    if (op.polarity == Polarity::kNeutral && op.evidence.empty()) continue;
    result.opinions.push_back(std::move(op));
  }
  return result;
}

BaselineScore baseline_wordcount(std::span<const Token> tokens, const PolarityLexicon& lex,
                                 const RuleConfig& cfg) {
  BaselineScore out;
  for (const Token& t : tokens) {
    const std::string& lemma = t.lemma.empty() || t.lemma == "_" ? t.form : t.lemma;
    out.valence += lex.lookup(lemma, t.upos).value_or(0.0);
  }
  out.polarity = classify_valence(out.valence, cfg.neutral_threshold);
  return out;
}

}  // namespace salsa
