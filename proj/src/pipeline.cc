#include "salsa/pipeline.h"

#include <sys/resource.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "salsa/sentiment_tree.h"

#ifndef SALSA_DATA_DIR
#define SALSA_DATA_DIR "data"
#endif

namespace salsa {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream is(value);
  T out{};
  if (!(is >> out) || !is.eof()) throw ConfigError("config key '" + key + "': bad number '" + value + "'");
  return out;
}

std::string sentence_text(const DepTree& tree) {
  std::string text;
  for (const Token& t : tree.tokens) {
    if (!text.empty()) text += ' ';
    text += t.form;
  }
  return text;
}

std::string span_text(const DepTree& tree, const TokenSpan& span) {
  std::string text;
  for (int id = span.first; id <= span.last; ++id) {
    if (!text.empty()) text += ' ';
    text += tree.at(id).form;
  }
  return text;
}

ordered_json trace_json(std::span<const TraceStep> trace) {
  ordered_json steps = ordered_json::array();
  for (const TraceStep& s : trace) {
    steps.push_back({{"token", s.token_id},
                     {"rule", to_string(s.rule)},
                     {"before", s.before},
                     {"after", s.after},
                     {"note", s.note}});
  }
  return steps;
}

ordered_json opinions_json(const DepTree& tree, const SentimentResult& result, bool explain) {
  ordered_json ops = ordered_json::array();
  for (const TargetOpinion& op : result.opinions) {
    ordered_json o = {{"target", {op.target.first, op.target.last}},
                      {"text", span_text(tree, op.target)},
                      {"valence", op.valence},
                      {"polarity", to_string(op.polarity)},
                      {"evidence", op.evidence}};
    if (explain) o["trace"] = trace_json(op.trace);
    ops.push_back(std::move(o));
  }
  return ops;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

void PipelineConfig::validate() const {
  if (language.empty()) throw ConfigError("language must not be empty");
  if (workers < 1) throw ConfigError("workers must be at least 1, got " + std::to_string(workers));
}

void apply_pipeline_config(std::istream& in, PipelineConfig& cfg) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key == "language") {
      cfg.language = value;
    } else if (key == "lexicon") {
      cfg.lexicon = value;
    } else if (key == "domain_lexicon") {
      cfg.domain_lexicon = value;
    } else if (key == "collocations") {
      cfg.collocations = value;
    } else if (key == "rules") {
      cfg.rules = value;
    } else if (key == "scheme") {
      const auto s = parse_scheme(value);
      if (!s) throw ConfigError("config key 'scheme': unknown scheme '" + value + "'");
      cfg.scheme = *s;
    } else if (key == "input") {
      cfg.input = value;
    } else if (key == "output") {
      cfg.output = value;
    } else if (key == "policy") {
      if (value == "skip") {
        cfg.policy = ErrorPolicy::kSkip;
      } else if (value == "abort") {
        cfg.policy = ErrorPolicy::kAbort;
      } else {
        throw ConfigError("config key 'policy': expected skip or abort, got '" + value + "'");
      }
    } else if (key == "workers") {
      cfg.workers = parse_number<int>(key, value);
    } else if (key == "seed") {
      cfg.seed = parse_number<std::uint64_t>(key, value);
    } else {
      throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
}

void apply_pipeline_config_file(const std::string& path, PipelineConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  apply_pipeline_config(in, cfg);
}

std::vector<std::string> lexicon_search_path() {
  std::vector<std::string> dirs;
  if (const char* env = std::getenv("SALSA_LEXICON_DIR"); env != nullptr && *env != '\0') {
    dirs.emplace_back(env);
  }
  dirs.emplace_back(std::string(SALSA_DATA_DIR) + "/lexicons");
  return dirs;
}

std::optional<std::string> resolve_lexicon_path(const std::string& path) {
  if (path.empty()) return std::nullopt;
  std::error_code ec;
  if (fs::is_regular_file(path, ec)) return path;
  if (fs::path(path).is_absolute()) return std::nullopt;
  for (const std::string& dir : lexicon_search_path()) {
    const fs::path candidate = fs::path(dir) / path;
    if (fs::is_regular_file(candidate, ec)) return candidate.string();
  }
  return std::nullopt;
}

PolarityLexicon load_pipeline_lexicon(const PipelineConfig& cfg) {
  auto require = [](const std::string& path) {
    if (auto found = resolve_lexicon_path(path)) return *found;
    std::string searched;
    for (const std::string& dir : lexicon_search_path()) searched += " " + dir;
    throw ConfigError("lexicon file '" + path + "' not found (searched:" + searched + ")");
  };
  const std::string base_path = require(cfg.lexicon.empty() ? cfg.language + ".tsv" : cfg.lexicon);
  std::string current = base_path;
  try {
    PolarityLexicon lex = load_lexicon_file(base_path, cfg.language);
    std::optional<std::string> colloc = cfg.collocations.empty()
                                            ? resolve_lexicon_path(cfg.language + ".colloc.tsv")
                                            : std::optional<std::string>(require(cfg.collocations));
    if (colloc) {
      current = *colloc;
      lex = lex.with_collocations(load_collocations_file(*colloc));
    }
    if (!cfg.domain_lexicon.empty()) {
      current = require(cfg.domain_lexicon);
      lex = overlay(lex, load_lexicon_file(current, cfg.language));
    }
    return lex;
  } catch (const LexiconError& e) {
    throw ConfigError(current + ":" + std::to_string(e.line()) + ": " + e.what());
  }
}

RuleConfig load_pipeline_rules(const PipelineConfig& cfg) {
  if (cfg.rules.empty()) return RuleConfig{};
  try {
    return load_rule_config_file(cfg.rules);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(cfg.rules + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Reports

std::string result_to_json(const DepTree& tree, const SentimentResult& result, ReportMode mode,
                           bool explain) {
  ordered_json j;
  j["sent_id"] = tree.sentence_id;
  if (mode == ReportMode::kFull) {
    j["text"] = sentence_text(tree);
    j["valence"] = result.valence;
    j["polarity"] = to_string(result.polarity);
  }
  j["opinions"] = opinions_json(tree, result, explain);
  if (explain && mode == ReportMode::kFull) j["trace"] = trace_json(result.trace);
  return j.dump();
}

std::string baseline_to_json(const DepTree& tree, const BaselineScore& score) {
  ordered_json j;
  j["sent_id"] = tree.sentence_id;
  j["text"] = sentence_text(tree);
  j["valence"] = score.valence;
  j["polarity"] = to_string(score.polarity);
  j["method"] = "baseline";
  return j.dump();
}

Prediction parse_prediction(const std::string& json_line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_line);
  } catch (const nlohmann::json::parse_error& e) {
    throw EvalError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw EvalError("prediction is not a JSON object");
  if (j.contains("tokens")) {
    GoldRecord g = parse_gold_record(json_line);
    return {g.sentence_id, g.gold_class, g.has_opinions, std::move(g.gold_opinions)};
  }
  Prediction p;
  if (!j.contains("sent_id") || !j["sent_id"].is_string()) throw EvalError("prediction without 'sent_id'");
  p.sentence_id = j["sent_id"].get<std::string>();
  p.opinions.sentence_id = p.sentence_id;
  auto polarity_of = [&p](const nlohmann::json& v) {
    const auto pol = v.is_string() ? parse_polarity(v.get<std::string>()) : std::nullopt;
    if (!pol) throw EvalError("prediction '" + p.sentence_id + "': bad polarity " + v.dump());
    return *pol;
  };
  if (j.contains("polarity")) p.polarity = polarity_of(j["polarity"]);
  if (j.contains("opinions")) {
    p.has_opinions = true;
    for (const auto& op : j["opinions"]) {
      const auto& t = op["target"];
      if (!t.is_array() || t.size() != 2 || !t[0].is_number_integer() || !t[1].is_number_integer()) {
        throw EvalError("prediction '" + p.sentence_id + "': opinion target must be [first, last]");
      }
      Opinion o;
      o.target = TokenSpan{t[0].get<int>(), t[1].get<int>()};
      o.expression = *o.target;
      if (op.contains("evidence") && op["evidence"].is_array() && !op["evidence"].empty()) {
        const int e = op["evidence"][0].get<int>();
        o.expression = {e, e};
      }
      o.polarity = polarity_of(op["polarity"]);
      p.opinions.opinions.push_back(o);
    }
  }
  return p;
}

// ---------------------------------------------------------------------------
// Synthetic corpus

std::vector<DepTree> synthetic_corpus(std::size_t sentences, int length, std::uint64_t seed,
                                      const PolarityLexicon& lex) {
  if (length < 1) throw std::invalid_argument("synthetic_corpus: length must be at least 1");
  struct Entry {
    std::string form;
    std::string upos;
  };
  std::vector<Entry> valenced;
  for (const LexEntry& e : lex.entries()) {
    if (e.term.find('_') != std::string::npos) continue;
    valenced.push_back({e.term, e.upos.empty() ? "ADV" : e.upos});
  }
  std::vector<Entry> shifters;
  const ShifterInventory& sh = lex.shifters();
  for (const auto& n : sh.negators) shifters.push_back({n, "PART"});
  for (const auto& [i, s] : sh.intensifiers) {
    if (i.find('_') == std::string::npos) shifters.push_back({i, "ADV"});
  }
  for (const auto& a : sh.adversatives) {
    if (a.find('_') == std::string::npos) shifters.push_back({a, "CCONJ"});
  }
  static const std::vector<Entry> kFillers = {
      {"the", "DET"},     {"a", "DET"},       {"phone", "NOUN"},   {"battery", "NOUN"},
      {"camera", "NOUN"}, {"screen", "NOUN"}, {"service", "NOUN"}, {"it", "PRON"},
      {"is", "AUX"},      {"was", "AUX"},     {"have", "VERB"},    {"use", "VERB"},
      {"and", "CCONJ"},   {"with", "ADP"},    {"for", "ADP"},      {",", "PUNCT"}};

  std::mt19937_64 rng(seed);
  std::discrete_distribution<int> pool({valenced.empty() ? 0.0 : 0.3, shifters.empty() ? 0.0 : 0.15, 0.55});
  std::vector<DepTree> corpus;
  corpus.reserve(sentences);
  for (std::size_t s = 0; s < sentences; ++s) {
    DepTree tree = random_projective_tree(length, rng());
    tree.sentence_id = "syn-" + std::to_string(s + 1);
    for (Token& t : tree.tokens) {
      const std::vector<Entry>* from = &kFillers;
      switch (pool(rng)) {
        case 0:
          from = &valenced;
          break;
        case 1:
          from = &shifters;
          break;
        default:
          break;
      }
      const Entry& e = (*from)[std::uniform_int_distribution<std::size_t>(0, from->size() - 1)(rng)];
      t.form = e.form;
      t.lemma = e.form;
      t.upos = e.upos;
    }
    corpus.push_back(std::move(tree));
  }
  return corpus;
}

// ---------------------------------------------------------------------------
// Benchmark

std::optional<long> peak_rss_kb() {
  rusage usage{};
  if (getrusage(RUSAGE_SELF, &usage) != 0) return std::nullopt;
  return usage.ru_maxrss;  // kilobytes on Linux
}

BenchReport run_bench(std::span<const DepTree> corpus, const PolarityLexicon& lex,
                      const RuleConfig& rules, const BenchOptions& options) {
  std::vector<std::string> lines;
  lines.reserve(corpus.size());
  for (const DepTree& tree : corpus) {
    try {
      lines.push_back(format_bridge_line(tree, encode(tree, options.scheme)));
    } catch (const EncodeError&) {
      // not representable under this scheme; left out of the run
    }
  }

  BenchReport report;
  report.workers = options.workers;
  report.scheme = options.scheme;
  auto pass = [&](std::span<const std::string> input, bool record) {
    const auto start = Clock::now();
    auto t = Clock::now();
    const auto records = parallel_map(input, options.workers, [&](const std::string& line) {
      return parse_bridge_line(line, options.scheme);
    });
    const double read = seconds_since(t);
    t = Clock::now();
    const auto decoded = parallel_map(std::span<const BridgeRecord>(records), options.workers,
                                      [](const BridgeRecord& r) { return decode(r.labels, r.words); });
    const double dec = seconds_since(t);
    t = Clock::now();
    const auto results = parallel_map(std::span<const DecodeResult>(decoded), options.workers,
                                      [&](const DecodeResult& d) { return analyze(d.tree, lex, rules); });
    const double rul = seconds_since(t);
    const double total = seconds_since(start);
    if (!record) return;
    report.read_seconds = read;
    report.decode_seconds = dec;
    report.rules_seconds = rul;
    report.total_seconds = total;
    report.sentences = results.size();
    for (const DecodeResult& d : decoded) {
      report.tokens += d.tree.size();
      report.repairs += d.repairs.total();
    }
  };
  if (options.warmup) {
    const std::size_t n = std::min<std::size_t>(lines.size(), 1000);
    pass(std::span<const std::string>(lines).first(n), false);
  }
  pass(lines, true);
  if (report.total_seconds > 0.0) {
    report.sentences_per_second = static_cast<double>(report.sentences) / report.total_seconds;
    report.tokens_per_second = static_cast<double>(report.tokens) / report.total_seconds;
  }
  const double decode_analyze = report.decode_seconds + report.rules_seconds;
  if (decode_analyze > 0.0) {
    report.decode_analyze_per_second = static_cast<double>(report.sentences) / decode_analyze;
  }
  report.peak_rss_kb = peak_rss_kb();
  return report;
}

std::string bench_to_json(const BenchReport& r, int indent) {
  ordered_json j;
  j["sentences"] = r.sentences;
  j["tokens"] = r.tokens;
  j["workers"] = r.workers;
  j["scheme"] = to_string(r.scheme);
  j["seconds"] = {{"read", r.read_seconds},
                  {"decode", r.decode_seconds},
                  {"rules", r.rules_seconds},
                  {"total", r.total_seconds}};
  j["sentences_per_second"] = r.sentences_per_second;
  j["tokens_per_second"] = r.tokens_per_second;
  j["decode_analyze_sentences_per_second"] = r.decode_analyze_per_second;
  j["repairs"] = r.repairs;
  j["peak_rss_kb"] = r.peak_rss_kb ? ordered_json(*r.peak_rss_kb) : ordered_json(nullptr);
  return j.dump(indent);
}

}  // namespace salsa
