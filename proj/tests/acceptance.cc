// Acceptance run: one [PASS]/[FAIL] line per criterion, non-zero exit if any
// criterion fails. Tolerances are fixed below.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "oracles.h"
#include "salsa/eval.h"
#include "salsa/pipeline.h"
#include "salsa/rules.h"
#include "salsa/sentiment_tree.h"
#include "salsa/seqlabel.h"

namespace {

constexpr int kTrees = 1000;
constexpr int kMaxLength = 40;
constexpr int kFuzzCases = 1000;
constexpr int kOpinionSets = 500;
constexpr double kValenceTolerance = 1e-9;
constexpr double kMetricTolerance = 1e-9;
constexpr double kThroughputTarget = 5000.0;
constexpr double kThroughputFloor = 1000.0;

using salsa::Polarity;
using salsa::Scheme;

constexpr Scheme kSchemes[] = {Scheme::kRelOffset, Scheme::kRelPos, Scheme::kBrackets};

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int n, const std::string& title, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("[%s] criterion %d: %s -- %s\n", o.pass ? "PASS" : "FAIL", n, title.c_str(), o.detail.c_str());
  std::fflush(stdout);
}

Outcome round_trip() {
  std::mt19937_64 rng(20240101);
  std::string detail;
  bool pass = true;
  for (Scheme scheme : kSchemes) {
    int mismatches = 0;
    std::size_t repairs = 0;
    for (int i = 0; i < kTrees; ++i) {
      const int n = 1 + static_cast<int>(rng() % kMaxLength);
      const auto tree = scheme == Scheme::kBrackets ? salsa::random_projective_tree(n, rng())
                                                    : salsa::random_tree(n, rng());
      const auto decoded = salsa::decode(salsa::encode(tree, scheme), tree.tokens);
      repairs += decoded.repairs.total();
      if (decoded.tree.tokens != tree.tokens) ++mismatches;
    }
    pass = pass && mismatches == 0 && repairs == 0;
    detail += std::string(salsa::to_string(scheme)) + ": " + std::to_string(mismatches) + " mismatches, " +
              std::to_string(repairs) + " repairs; ";
  }
  return {pass, detail + std::to_string(kTrees) + " trees per scheme, n <= " + std::to_string(kMaxLength)};
}

Outcome repair_totality() {
  std::mt19937_64 rng(777);
  std::string detail;
  bool pass = true;
  for (Scheme scheme : kSchemes) {
    int failed = 0;
    std::size_t repaired = 0;
    for (int i = 0; i < kFuzzCases; ++i) {
      const int n = 1 + static_cast<int>(rng() % kMaxLength);
      const auto words = salsa::random_tree(n, rng()).tokens;
      const auto decoded = salsa::decode(oracle::fuzz_labels(n, scheme, rng), words);
      repaired += decoded.repairs.total() > 0 ? 1 : 0;
      if (!oracle::is_tree(decoded.tree.heads()) || !salsa::is_valid(decoded.tree)) ++failed;
    }
    pass = pass && failed == 0;
    detail += std::string(salsa::to_string(scheme)) + ": " + std::to_string(failed) + " invalid (" +
              std::to_string(repaired) + " needed repair); ";
  }
  return {pass, detail};
}

Outcome contrast_pair() {
  const auto lex = oracle::demo_lexicon("en");
  const salsa::RuleConfig cfg;
  const auto a = salsa::classify_sentence(oracle::demo_tree("demo-1"), lex, cfg);
  const auto b = salsa::classify_sentence(oracle::demo_tree("demo-2"), lex, cfg);
  const auto ba = salsa::baseline_wordcount(oracle::demo_tree("demo-1").tokens, lex, cfg);
  const auto bb = salsa::baseline_wordcount(oracle::demo_tree("demo-2").tokens, lex, cfg);
  const bool pass = a.polarity == Polarity::kPositive && b.polarity == Polarity::kNegative &&
                    ba.polarity == bb.polarity;
  return {pass, "rules " + std::string(salsa::to_string(a.polarity)) + " / " +
                    std::string(salsa::to_string(b.polarity)) + ", baseline " +
                    std::string(salsa::to_string(ba.polarity)) + " / " + std::string(salsa::to_string(bb.polarity))};
}

Outcome aspect_sentence() {
  const auto lex = oracle::demo_lexicon("en");
  const salsa::RuleConfig cfg;
  const auto r = salsa::analyze(oracle::demo_tree("demo-3"), lex, cfg);
  // hand replay: "really like" and "not acceptable"
  const double camera = *lex.lookup("like", "VERB") * (1.0 + lex.shifters().intensifiers.at("really"));
  const double battery = oracle::negate(*lex.lookup("acceptable", "ADJ"), cfg.negation_shift, cfg.negation_cap);
  const double sentence = cfg.adversative_before * camera + cfg.adversative_after * battery;
  const salsa::TargetOpinion* cam = nullptr;
  const salsa::TargetOpinion* bat = nullptr;
  for (const auto& op : r.opinions) {
    if (op.target_text == "camera") cam = &op;
    if (op.target_text.find("battery") != std::string::npos) bat = &op;
  }
  if (!cam || !bat) return {false, "camera or battery target missing"};
  const bool pass = cam->polarity == Polarity::kPositive && bat->polarity == Polarity::kNegative &&
                    std::abs(cam->valence - camera) <= kValenceTolerance &&
                    std::abs(bat->valence - battery) <= kValenceTolerance &&
                    std::abs(r.valence - sentence) <= kValenceTolerance;
  char buf[160];
  std::snprintf(buf, sizeof buf, "camera %+.3f, %s %+.3f, sentence %+.3f (oracle %+.3f / %+.3f / %+.3f)",
                cam->valence, bat->target_text.c_str(), bat->valence, r.valence, camera, battery, sentence);
  return {pass, buf};
}

salsa::DepTree copular(const std::string& adj, const std::string& negator) {
  salsa::DepTree t;
  if (negator.empty()) {
    t.tokens = {{1, "X", "x", "NOUN", 3, "nsubj"}, {2, "is", "be", "AUX", 3, "cop"}, {3, adj, adj, "ADJ", 0, "root"}};
  } else {
    t.tokens = {{1, "X", "x", "NOUN", 4, "nsubj"},
                {2, "is", "be", "AUX", 4, "cop"},
                {3, negator, negator, "PART", 4, "advmod"},
                {4, adj, adj, "ADJ", 0, "root"}};
  }
  return t;
}

Outcome shifter_properties() {
  const salsa::RuleConfig cfg;
  int violations = 0, flips = 0, boosts = 0;
  for (const char* lang : {"en", "es"}) {
    const auto lex = oracle::demo_lexicon(lang);
    for (const auto& e : lex.entries()) {
      if (e.upos != "ADJ" || e.valence == 0.0) continue;
      const double negated = oracle::negate(e.valence, cfg.negation_shift, cfg.negation_cap);
      const bool eligible = std::abs(e.valence) > cfg.neutral_threshold &&
                            (e.valence > 0 ? negated < -cfg.neutral_threshold : negated > cfg.neutral_threshold);
      if (eligible) {
        for (const auto& neg : lex.shifters().negators) {
          if (neg.find('_') != std::string::npos) continue;
          ++flips;
          const auto plain = salsa::classify_sentence(copular(e.term, ""), lex, cfg).polarity;
          const auto flipped = salsa::classify_sentence(copular(e.term, neg), lex, cfg).polarity;
          if (plain == flipped || flipped == Polarity::kNeutral) ++violations;
        }
      }
      for (const auto& [word, strength] : lex.shifters().intensifiers) {
        if (strength < 0 || word.find('_') != std::string::npos) continue;
        ++boosts;
        salsa::DepTree plain, boosted;
        plain.tokens = {{1, e.term, e.term, "ADJ", 0, "root"}};
        boosted.tokens = {{1, word, word, "ADV", 2, "advmod"}, {2, e.term, e.term, "ADJ", 0, "root"}};
        const double a = salsa::score_tree(plain, lex, cfg).valence;
        const double b = salsa::score_tree(boosted, lex, cfg).valence;
        if (std::abs(b) < std::abs(a)) ++violations;
      }
    }
  }
  return {violations == 0 && flips > 0 && boosts > 0, std::to_string(violations) + " violations over " +
                                                           std::to_string(flips) + " negation and " +
                                                           std::to_string(boosts) + " intensifier checks"};
}

Outcome sentiment_tree_round_trip() {
  std::mt19937_64 rng(4242);
  int mismatches = 0;
  std::size_t opinions = 0;
  for (int i = 0; i < kOpinionSets; ++i) {
    const int n = 1 + static_cast<int>(rng() % kMaxLength);
    const auto os = salsa::random_opinion_set(n, 5, rng());
    opinions += os.opinions.size();
    auto back = salsa::from_tree(salsa::decode(salsa::encode(salsa::to_tree(os), Scheme::kRelOffset),
                                               salsa::to_tree(os).tokens)
                                     .tree);
    back.sentence_id = os.sentence_id;
    if (!(back == os)) ++mismatches;
  }
  return {mismatches == 0, std::to_string(mismatches) + " mismatches over " + std::to_string(kOpinionSets) +
                               " sets (" + std::to_string(opinions) + " opinions)"};
}

Outcome evaluation_consistency() {
  std::ifstream in(oracle::data_path("demo/gold.jsonl"));
  const auto gold = salsa::load_gold(in, salsa::ErrorPolicy::kAbort);
  std::vector<Polarity> classes;
  std::vector<salsa::OpinionSet> sets;
  std::vector<salsa::DepTree> parses;
  for (const auto& g : gold) {
    if (g.gold_class) classes.push_back(*g.gold_class);
    if (g.has_opinions) sets.push_back(g.gold_opinions);
    if (g.parse) parses.push_back(*g.parse);
  }
  const auto s = salsa::eval_sentences(classes, classes);
  const auto te = salsa::eval_targets(sets, sets, salsa::MatchMode::kExact);
  const auto to = salsa::eval_targets(sets, sets, salsa::MatchMode::kOverlap);
  const auto p = salsa::eval_parse(parses, parses);
  bool self = s.accuracy == 1.0 && s.macro_f1 == 1.0 && te.precision == 1.0 && te.recall == 1.0 &&
              te.f1 == 1.0 && to.f1 == 1.0 && p.uas == 1.0 && p.las == 1.0;
  for (Polarity c : salsa::kAllPolarities) self = self && s.of(c).f1 == 1.0;

  const std::vector<Polarity> pred = {Polarity::kPositive, Polarity::kPositive, Polarity::kNegative};
  const std::vector<Polarity> gold3 = {Polarity::kPositive, Polarity::kNegative, Polarity::kNegative};
  const auto w = salsa::eval_sentences(pred, gold3);
  const bool worked = std::abs(w.accuracy - 2.0 / 3.0) <= kMetricTolerance &&
                      std::abs(w.macro_f1 - 4.0 / 9.0) <= kMetricTolerance;
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "gold-vs-gold %s over %zu records (%zu opinion sets, %zu parse tokens); worked case acc %.12f "
                "macro-F1 %.12f",
                self ? "all 1.0" : "NOT all 1.0", gold.size(), sets.size(), p.tokens, w.accuracy, w.macro_f1);
  return {self && worked, buf};
}

Outcome throughput() {
  const auto lex = oracle::demo_lexicon("en");
  const salsa::RuleConfig rules;
  const auto corpus = salsa::synthetic_corpus(10000, 20, 1, lex);
  const auto r = salsa::run_bench(corpus, lex, rules, {Scheme::kRelOffset, 1, true});
  const double rate = r.decode_analyze_per_second;
  const bool staged = r.read_seconds > 0 && r.decode_seconds > 0 && r.rules_seconds > 0;
  char buf[240];
  std::snprintf(buf, sizeof buf,
                "decode+analyze %.0f sentences/s single-threaded (target %.0f, floor %.0f); stages read %.3fs "
                "decode %.3fs rules %.3fs; repairs %zu",
                rate, kThroughputTarget, kThroughputFloor, r.read_seconds, r.decode_seconds, r.rules_seconds,
                r.repairs);
  return {staged && r.sentences == 10000 && rate >= kThroughputTarget && rate >= kThroughputFloor, buf};
}

}  // namespace

int main() {
  report(1, "encoding round trip", round_trip);
  report(2, "repair totality", repair_totality);
  report(3, "contrast pair vs word-count baseline", contrast_pair);
  report(4, "aspect sentence", aspect_sentence);
  report(5, "negation and intensifier properties", shifter_properties);
  report(6, "sentiment-tree round trip", sentiment_tree_round_trip);
  report(7, "evaluation self-consistency", evaluation_consistency);
  report(8, "throughput", throughput);
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
