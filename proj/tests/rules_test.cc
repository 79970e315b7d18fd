#include <gtest/gtest.h>

#include <sstream>

#include "oracles.h"
#include "salsa/pipeline.h"
#include "salsa/rules.h"

namespace {

using salsa::Polarity;
using salsa::Rule;
using salsa::RuleConfig;

salsa::DepTree parse(std::vector<salsa::Token> tokens) {
  salsa::DepTree t;
  t.tokens = std::move(tokens);
  return t;
}

// "X is <w>" and "X is not <w>" with <w> as an adjectival predicate.
salsa::DepTree copular(const std::string& w, const std::string& negator) {
  std::vector<salsa::Token> toks = {{1, "X", "x", "NOUN", 3, "nsubj"}, {2, "is", "be", "AUX", 3, "cop"}};
  if (!negator.empty()) {
    toks.push_back({3, negator, negator, "PART", 4, "advmod"});
    toks.push_back({4, w, w, "ADJ", 0, "root"});
    toks[0].head = 4;
    toks[1].head = 4;
  } else {
    toks.push_back({3, w, w, "ADJ", 0, "root"});
  }
  return parse(toks);
}

class DemoRules : public ::testing::Test {
 protected:
  salsa::PolarityLexicon en = oracle::demo_lexicon("en");
  RuleConfig cfg;
  double L(const std::string& lemma, const std::string& upos) const { return en.lookup(lemma, upos).value(); }
  double s(const std::string& lemma) const { return en.shifters().intensifiers.at(lemma); }
};

TEST_F(DemoRules, ContrastPairHandReplay) {
  const auto first = salsa::classify_sentence(oracle::demo_tree("demo-1"), en, cfg);
  const auto second = salsa::classify_sentence(oracle::demo_tree("demo-2"), en, cfg);
  const double expect_first =
      L("good", "ADJ") + oracle::negate(L("expensive", "ADJ"), cfg.negation_shift, cfg.negation_cap);
  const double expect_second =
      L("expensive", "ADJ") + oracle::negate(L("good", "ADJ"), cfg.negation_shift, cfg.negation_cap);
  EXPECT_NEAR(first.valence, expect_first, 1e-9);
  EXPECT_NEAR(second.valence, expect_second, 1e-9);
  EXPECT_NEAR(first.valence, 5.0, 1e-9);
  EXPECT_NEAR(second.valence, -3.0, 1e-9);
  EXPECT_EQ(first.polarity, Polarity::kPositive);
  EXPECT_EQ(second.polarity, Polarity::kNegative);
  EXPECT_TRUE(first.opinions.empty());
}

TEST_F(DemoRules, ContrastPairBaselineCannotTellThemApart) {
  const auto a = salsa::baseline_wordcount(oracle::demo_tree("demo-1").tokens, en, cfg);
  const auto b = salsa::baseline_wordcount(oracle::demo_tree("demo-2").tokens, en, cfg);
  EXPECT_EQ(a, b);
  EXPECT_NEAR(a.valence, L("good", "ADJ") + L("expensive", "ADJ"), 1e-9);
}

TEST_F(DemoRules, AspectSentenceHandReplay) {
  const auto tree = oracle::demo_tree("demo-3");
  const auto result = salsa::analyze(tree, en, cfg);
  const double camera = L("like", "VERB") * (1.0 + s("really"));
  const double battery = oracle::negate(L("acceptable", "ADJ"), cfg.negation_shift, cfg.negation_cap);
  ASSERT_EQ(result.opinions.size(), 2u);
  EXPECT_EQ(result.opinions[0].target_text, "camera");
  EXPECT_EQ(result.opinions[0].target, (salsa::TokenSpan{7, 7}));
  EXPECT_NEAR(result.opinions[0].valence, camera, 1e-9);
  EXPECT_EQ(result.opinions[0].polarity, Polarity::kPositive);
  EXPECT_EQ(result.opinions[0].evidence, (std::vector<int>{3}));
  EXPECT_EQ(result.opinions[1].target_text, "battery life");
  EXPECT_EQ(result.opinions[1].target, (salsa::TokenSpan{11, 12}));
  EXPECT_NEAR(result.opinions[1].valence, battery, 1e-9);
  EXPECT_EQ(result.opinions[1].polarity, Polarity::kNegative);
  EXPECT_NEAR(result.valence, cfg.adversative_before * camera + cfg.adversative_after * battery, 1e-9);
  EXPECT_EQ(result.polarity, Polarity::kNegative);
}

TEST_F(DemoRules, AspectCandidatesIncludeCameraAndBatteryLife) {
  const auto cands = salsa::extract_targets(oracle::demo_tree("demo-3"));
  std::vector<salsa::TokenSpan> spans;
  for (const auto& c : cands) spans.push_back(c.span);
  EXPECT_EQ(spans, (std::vector<salsa::TokenSpan>{{5, 5}, {7, 7}, {11, 12}}));
  EXPECT_EQ(cands[2].head, 12);
}

TEST_F(DemoRules, SingleWordSentence) {
  const auto r = salsa::analyze(oracle::demo_tree("demo-4"), en, cfg);
  EXPECT_NEAR(r.valence, L("great", "ADJ"), 1e-9);
  EXPECT_EQ(r.polarity, Polarity::kPositive);
  EXPECT_TRUE(r.opinions.empty());
}

TEST_F(DemoRules, NeutralSentence) {
  const auto r = salsa::analyze(oracle::demo_tree("demo-6"), en, cfg);
  EXPECT_EQ(r.valence, 0.0);
  EXPECT_EQ(r.polarity, Polarity::kNeutral);
  EXPECT_TRUE(r.opinions.empty());
}

TEST_F(DemoRules, TracesReplayExactly) {
  std::vector<salsa::DepTree> trees = oracle::demo_trees();
  const auto synthetic = salsa::synthetic_corpus(300, 18, 5, en);
  trees.insert(trees.end(), synthetic.begin(), synthetic.end());
  for (const auto& t : trees) {
    const auto r = salsa::analyze(t, en, cfg);
    EXPECT_EQ(salsa::replay_trace(r.trace), r.valence) << t.sentence_id;
    ASSERT_FALSE(r.trace.empty());
    EXPECT_EQ(r.trace.back().rule, Rule::kAggregate);
    for (const auto& op : r.opinions) {
      EXPECT_EQ(salsa::replay_trace(op.trace), op.valence) << t.sentence_id;
      EXPECT_FALSE(op.target_text.empty());
      if (op.polarity != Polarity::kNeutral) EXPECT_FALSE(op.evidence.empty());
    }
    EXPECT_EQ(r.polarity, salsa::classify_valence(r.valence, cfg.neutral_threshold));
  }
}

TEST_F(DemoRules, TraceStepsForTheAspectSentence) {
  const auto r = salsa::classify_sentence(oracle::demo_tree("demo-3"), en, cfg);
  std::vector<Rule> rules;
  for (const auto& step : r.trace) rules.push_back(step.rule);
  EXPECT_EQ(rules, (std::vector<Rule>{Rule::kLexicon, Rule::kNegate, Rule::kLexicon, Rule::kIntensify,
                                      Rule::kAdversative, Rule::kAggregate}));
}

TEST_F(DemoRules, VacuousNegationIsRecorded) {
  // "not X" where X carries no valence
  const auto t = parse({{1, "not", "not", "PART", 2, "advmod"}, {2, "phone", "phone", "NOUN", 0, "root"}});
  const auto r = salsa::classify_sentence(t, en, cfg);
  EXPECT_EQ(r.valence, 0.0);
  bool vacuous = false;
  for (const auto& step : r.trace) {
    vacuous = vacuous || (step.rule == Rule::kNegate && step.note.find("vacuous") != std::string::npos);
  }
  EXPECT_TRUE(vacuous);
}

TEST(Rules, EmptyLexiconGivesNeutralAndOnlyAggregate) {
  const salsa::PolarityLexicon empty("en");
  const auto r = salsa::classify_sentence(oracle::demo_tree("demo-1"), empty, RuleConfig{});
  EXPECT_EQ(r.valence, 0.0);
  EXPECT_EQ(r.polarity, Polarity::kNeutral);
  ASSERT_EQ(r.trace.size(), 1u);
  EXPECT_EQ(r.trace[0].rule, Rule::kAggregate);
}

TEST(Rules, ThresholdClassification) {
  EXPECT_EQ(salsa::classify_valence(5.0, 0.5), Polarity::kPositive);
  EXPECT_EQ(salsa::classify_valence(-3.0, 0.5), Polarity::kNegative);
  EXPECT_EQ(salsa::classify_valence(0.3, 0.5), Polarity::kNeutral);
  EXPECT_EQ(salsa::classify_valence(0.5, 0.5), Polarity::kNeutral);
  EXPECT_EQ(salsa::classify_valence(-0.5, 0.5), Polarity::kNeutral);
}

TEST_F(DemoRules, NegationFlipsClassForEveryEligibleAdjective) {
  for (const char* lang : {"en", "es"}) {
    const auto lex = oracle::demo_lexicon(lang);
    const std::string neg = *lex.shifters().negators.begin();
    int checked = 0;
    for (const auto& e : lex.entries()) {
      if (e.upos != "ADJ") continue;
      const double v = e.valence;
      const double negated = oracle::negate(v, cfg.negation_shift, cfg.negation_cap);
      const bool eligible = std::abs(v) > cfg.neutral_threshold &&
                            (v > 0 ? negated < -cfg.neutral_threshold : negated > cfg.neutral_threshold);
      if (!eligible) continue;
      ++checked;
      const auto plain = salsa::classify_sentence(copular(e.term, ""), lex, cfg).polarity;
      const auto negd = salsa::classify_sentence(copular(e.term, neg), lex, cfg).polarity;
      EXPECT_NE(plain, negd) << lang << " " << e.term;
    }
    EXPECT_GT(checked, 10) << lang;
  }
}

TEST_F(DemoRules, IntensifiersNeverWeaken) {
  for (const char* lang : {"en", "es"}) {
    const auto lex = oracle::demo_lexicon(lang);
    for (const auto& [intensifier, strength] : lex.shifters().intensifiers) {
      if (strength < 0) continue;
      for (const auto& e : lex.entries()) {
        if (e.upos != "ADJ") continue;
        const auto plain = parse({{1, e.term, e.term, "ADJ", 0, "root"}});
        const auto boosted = parse({{1, intensifier, intensifier, "ADV", 2, "advmod"},
                                    {2, e.term, e.term, "ADJ", 0, "root"}});
        const double a = salsa::score_tree(plain, lex, cfg).valence;
        const double b = salsa::score_tree(boosted, lex, cfg).valence;
        EXPECT_GE(std::abs(b), std::abs(a)) << intensifier << " " << e.term;
      }
    }
  }
}

TEST_F(DemoRules, IntensifiersComposeMultiplicatively) {
  const auto t = parse({{1, "really", "really", "ADV", 3, "advmod"},
                        {2, "very", "very", "ADV", 3, "advmod"},
                        {3, "good", "good", "ADJ", 0, "root"}});
  EXPECT_NEAR(salsa::score_tree(t, en, cfg).valence, L("good", "ADJ") * (1 + s("really")) * (1 + s("very")),
              1e-9);
}

TEST_F(DemoRules, AdversativeOrderSensitivity) {
  std::vector<salsa::LexEntry> adjectives;
  for (const auto& e : en.entries()) {
    if (e.upos == "ADJ") adjectives.push_back(e);
  }
  auto but = [](const std::string& a, const std::string& b) {
    return parse({{1, a, a, "ADJ", 0, "root"}, {2, "but", "but", "CCONJ", 3, "cc"}, {3, b, b, "ADJ", 1, "conj"}});
  };
  for (const auto& x : adjectives) {
    for (const auto& y : adjectives) {
      if (x.valence == y.valence) continue;
      const double xy = salsa::score_tree(but(x.term, y.term), en, cfg).valence;
      const double yx = salsa::score_tree(but(y.term, x.term), en, cfg).valence;
      // The later conjunct weighs more, so the order with the larger value last wins.
      EXPECT_EQ(xy < yx, x.valence > y.valence) << x.term << " / " << y.term;
      EXPECT_NEAR(xy, cfg.adversative_before * x.valence + cfg.adversative_after * y.valence, 1e-9);
    }
  }
}

TEST_F(DemoRules, LastAdversativeMarkerSplitsTheSentence) {
  const auto t = parse({{1, "good", "good", "ADJ", 0, "root"},
                        {2, "but", "but", "CCONJ", 3, "cc"},
                        {3, "bad", "bad", "ADJ", 1, "conj"},
                        {4, "but", "but", "CCONJ", 5, "cc"},
                        {5, "great", "great", "ADJ", 1, "conj"}});
  const double before = L("good", "ADJ") + L("bad", "ADJ");
  EXPECT_NEAR(salsa::score_tree(t, en, cfg).valence,
              cfg.adversative_before * before + cfg.adversative_after * L("great", "ADJ"), 1e-9);
}

TEST_F(DemoRules, CollocationMergesAtAll) {
  const auto lemmas = salsa::effective_lemmas(oracle::demo_tree("demo-1"), en);
  EXPECT_EQ(lemmas[9], "at_all");
  EXPECT_EQ(lemmas[10], "");
  EXPECT_EQ(lemmas[7], "be");
}

TEST(Targets, RedCarIsOneCandidate) {
  const auto t = parse({{1, "the", "the", "DET", 3, "det"},
                        {2, "red", "red", "ADJ", 3, "amod"},
                        {3, "car", "car", "NOUN", 0, "root"}});
  const auto cands = salsa::extract_targets(t);
  ASSERT_EQ(cands.size(), 1u);
  EXPECT_EQ(cands[0].head, 3);
  EXPECT_EQ(cands[0].span, (salsa::TokenSpan{2, 3}));
}

TEST(Targets, NoNounsNoCandidates) {
  const auto t = parse({{1, "It", "it", "PRON", 2, "nsubj"},
                        {2, "works", "work", "VERB", 0, "root"},
                        {3, "well", "well", "ADV", 2, "advmod"}});
  EXPECT_TRUE(salsa::extract_targets(t).empty());
}

TEST(Targets, ForeignSpanIsRejected) {
  const auto lex = oracle::demo_lexicon("en");
  const auto t = oracle::demo_tree("demo-3");
  EXPECT_THROW(salsa::score_target(t, lex, RuleConfig{}, {1, 1}), salsa::TargetError);
  EXPECT_THROW(salsa::score_target(t, lex, RuleConfig{}, {12, 12}), salsa::TargetError);
}

TEST(Targets, AmodEvidenceAndNoEvidence) {
  const auto lex = oracle::demo_lexicon("en");
  const auto t = parse({{1, "a", "a", "DET", 3, "det"},
                        {2, "great", "great", "ADJ", 3, "amod"},
                        {3, "camera", "camera", "NOUN", 0, "root"},
                        {4, "and", "and", "CCONJ", 5, "cc"},
                        {5, "case", "case", "NOUN", 3, "conj"}});
  const auto great = salsa::score_target(t, lex, RuleConfig{}, {2, 3});
  EXPECT_EQ(great.evidence, (std::vector<int>{2}));
  EXPECT_NEAR(great.valence, 4.0, 1e-9);
  const auto none = salsa::score_target(t, lex, RuleConfig{}, {5, 5});
  EXPECT_TRUE(none.evidence.empty());
  EXPECT_EQ(none.valence, 0.0);
  EXPECT_EQ(none.polarity, Polarity::kNeutral);
  // analyze prunes the neutral, evidence-free one
  const auto r = salsa::analyze(t, lex, RuleConfig{});
  ASSERT_EQ(r.opinions.size(), 1u);
  EXPECT_EQ(r.opinions[0].target_text, "great camera");
}

TEST(Baseline, SumsWithoutShifters) {
  const auto lex = oracle::demo_lexicon("en");
  const auto t = parse({{1, "good", "good", "ADJ", 0, "root"}, {2, "good", "good", "ADJ", 1, "conj"}});
  EXPECT_EQ(salsa::baseline_wordcount(t.tokens, lex, RuleConfig{}), (salsa::BaselineScore{6.0, Polarity::kPositive}));
  EXPECT_EQ(salsa::baseline_wordcount({}, lex, RuleConfig{}), (salsa::BaselineScore{0.0, Polarity::kNeutral}));
}

TEST(Config, LoadsKeysAndRejectsNonsense) {
  std::istringstream in(
      "# tuned\nnegation_shift = 3\nnegation_cap=4.5\nadversative_weights = 0.25, 2\n"
      "neutral_threshold = 0\nnegation_scope = HEAD_SUBTREE\n");
  const RuleConfig c = salsa::load_rule_config(in);
  EXPECT_EQ(c.negation_shift, 3.0);
  EXPECT_EQ(c.negation_cap, 4.5);
  EXPECT_EQ(c.adversative_before, 0.25);
  EXPECT_EQ(c.adversative_after, 2.0);
  EXPECT_EQ(c.neutral_threshold, 0.0);
  for (const char* bad : {"negation_cap = 6\n", "negation_cap = 0\n", "neutral_threshold = -1\n",
                          "adversative_weights = -1, 1\n", "adversative_weights = 1\n", "colour = red\n",
                          "negation_scope = CLAUSE\n", "negation_shift = lots\n", "no equals sign\n"}) {
    std::istringstream bin(bad);
    EXPECT_THROW(salsa::load_rule_config(bin), std::invalid_argument) << bad;
  }
  EXPECT_NO_THROW(salsa::load_rule_config_file(oracle::data_path("demo/rules.cfg")));
}

TEST(Determinism, AnalyzeIsPure) {
  const auto lex = oracle::demo_lexicon("en");
  const auto t = oracle::demo_tree("demo-3");
  const auto a = salsa::analyze(t, lex, RuleConfig{});
  const auto b = salsa::analyze(t, lex, RuleConfig{});
  EXPECT_EQ(a.valence, b.valence);
  EXPECT_EQ(a.trace.size(), b.trace.size());
  EXPECT_EQ(a.opinions.size(), b.opinions.size());
}

TEST(Spanish, NegatedAdjective) {
  const auto es = oracle::demo_lexicon("es");
  const auto t = parse({{1, "La", "el", "DET", 2, "det"},
                        {2, "batería", "batería", "NOUN", 5, "nsubj"},
                        {3, "no", "no", "ADV", 5, "advmod"},
                        {4, "es", "ser", "AUX", 5, "cop"},
                        {5, "buena", "bueno", "ADJ", 0, "root"}});
  const auto r = salsa::analyze(t, es, RuleConfig{});
  EXPECT_NEAR(r.valence, 3.0 - 4.0, 1e-9);
  EXPECT_EQ(r.polarity, Polarity::kNegative);
  ASSERT_EQ(r.opinions.size(), 1u);
  EXPECT_EQ(r.opinions[0].target_text, "batería");
}

}  // namespace
