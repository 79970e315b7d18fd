#include "salsa/cli.h"

#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <unordered_map>

#include "CLI11.hpp"
#include "salsa/conllu.h"
#include "salsa/eval.h"
#include "salsa/pipeline.h"
#include "salsa/rules.h"
#include "salsa/sentiment_tree.h"
#include "salsa/seqlabel.h"

namespace salsa {

namespace {

// Flags of one subcommand. Values given on the command line are applied over
// the config file, which is applied over the defaults.
struct Flags {
  std::string config_path;
  PipelineConfig given;
  std::string scheme;
  std::string policy;
  std::vector<std::pair<CLI::Option*, std::function<void(PipelineConfig&)>>> setters;

  PipelineConfig resolve() const {
    PipelineConfig cfg;
    if (!config_path.empty()) apply_pipeline_config_file(config_path, cfg);
    for (const auto& [opt, set] : setters) {
      if (opt->count() > 0) set(cfg);
    }
    cfg.validate();
    return cfg;
  }
};

enum Want : unsigned {
  kLexicon = 1,
  kRules = 2,
  kScheme = 4,
  kIo = 8,
  kWorkers = 16,
  kSeed = 32,
};

void add_flags(CLI::App* app, Flags& f, unsigned want) {
  app->add_option("--config", f.config_path, "key = value file; flags override it");
  auto text = [&](const char* name, std::string PipelineConfig::*field, const char* help) {
    CLI::Option* opt = app->add_option(name, f.given.*field, help);
    f.setters.emplace_back(opt, [&f, field](PipelineConfig& c) { c.*field = f.given.*field; });
  };
  if (want & kLexicon) {
    text("-l,--language", &PipelineConfig::language, "lexicon language (default en)");
    text("--lexicon", &PipelineConfig::lexicon, "base lexicon file");
    text("--domain-lexicon", &PipelineConfig::domain_lexicon, "domain lexicon overlaid on the base");
    text("--collocations", &PipelineConfig::collocations, "collocation table");
  }
  if (want & kRules) text("--rules", &PipelineConfig::rules, "rule config file");
  if (want & kIo) {
    text("-i,--input", &PipelineConfig::input, "input file, - for stdin");
    text("-o,--output", &PipelineConfig::output, "output file, - for stdout");
    CLI::Option* opt = app->add_option("--policy", f.policy, "on bad records: skip or abort")
                           ->check(CLI::IsMember({"skip", "abort"}));
    f.setters.emplace_back(opt, [&f](PipelineConfig& c) {
      c.policy = f.policy == "abort" ? ErrorPolicy::kAbort : ErrorPolicy::kSkip;
    });
  }
  if (want & kScheme) {
    CLI::Option* opt = app->add_option("-s,--scheme", f.scheme, "rel-offset, rel-pos or brackets");
    f.setters.emplace_back(opt, [&f](PipelineConfig& c) {
      const auto s = parse_scheme(f.scheme);
      if (!s) throw ConfigError("unknown scheme '" + f.scheme + "'");
      c.scheme = *s;
    });
  }
  if (want & kWorkers) {
    CLI::Option* opt = app->add_option("-w,--workers", f.given.workers, "worker threads");
    f.setters.emplace_back(opt, [&f](PipelineConfig& c) { c.workers = f.given.workers; });
  }
  if (want & kSeed) {
    CLI::Option* opt = app->add_option("--seed", f.given.seed, "random seed");
    f.setters.emplace_back(opt, [&f](PipelineConfig& c) { c.seed = f.given.seed; });
  }
}

// Opens cfg.input / cfg.output, falling back to the caller's streams for "-".
class Streams {
 public:
  Streams(std::istream& in, std::ostream& out) : in_(&in), out_(&out) {}

  std::istream& input(const std::string& path) {
    if (path.empty() || path == "-") return *in_;
    file_in_ = std::make_unique<std::ifstream>(path);
    if (!*file_in_) throw ConfigError("cannot open input '" + path + "'");
    return *file_in_;
  }
  std::ostream& output(const std::string& path) {
    if (path.empty() || path == "-") return *out_;
    file_out_ = std::make_unique<std::ofstream>(path);
    if (!*file_out_) throw ConfigError("cannot open output '" + path + "'");
    return *file_out_;
  }

 private:
  std::istream* in_;
  std::ostream* out_;
  std::unique_ptr<std::ifstream> file_in_;
  std::unique_ptr<std::ofstream> file_out_;
};

void report_errors(std::ostream& err, const std::vector<RecordError>& errors, const char* what) {
  for (const RecordError& e : errors) {
    err << "warning: skipped " << what;
    if (e.ordinal > 0) err << ' ' << e.ordinal;
    if (e.line > 0) err << " (line " << e.line << ")";
    err << ": " << e.message << '\n';
  }
}

// Records a record-level error under the configured policy.
void record_error(ErrorPolicy policy, RecordError error, std::ostream& err, const char* what) {
  if (policy == ErrorPolicy::kAbort) throw DataError(std::move(error));
  report_errors(err, {error}, what);
}

constexpr std::size_t kChunk = 4096;

int cmd_analyze(const PipelineConfig& cfg, bool explain, bool baseline, ReportMode mode,
                Streams& io, std::ostream& err) {
  const PolarityLexicon lex = load_pipeline_lexicon(cfg);
  const RuleConfig rules = load_pipeline_rules(cfg);
  std::istream& in = io.input(cfg.input);
  std::ostream& out = io.output(cfg.output);
  ConlluReader reader(in, cfg.policy);
  std::vector<DepTree> chunk;
  auto flush = [&]() {
    const auto lines = parallel_map(std::span<const DepTree>(chunk), cfg.workers, [&](const DepTree& t) {
      if (baseline) return baseline_to_json(t, baseline_wordcount(t.tokens, lex, rules));
      return result_to_json(t, analyze(t, lex, rules), mode, explain);
    });
    for (const std::string& line : lines) out << line << '\n';
    chunk.clear();
  };
  while (auto tree = reader.next()) {
    chunk.push_back(std::move(*tree));
    if (chunk.size() == kChunk) flush();
  }
  flush();
  report_errors(err, reader.errors(), "sentence");
  return kExitOk;
}

int cmd_encode(const PipelineConfig& cfg, bool with_polarity, Streams& io, std::ostream& err) {
  std::optional<PolarityLexicon> lex;
  RuleConfig rules;
  if (with_polarity) {
    lex = load_pipeline_lexicon(cfg);
    rules = load_pipeline_rules(cfg);
  }
  std::istream& in = io.input(cfg.input);
  std::ostream& out = io.output(cfg.output);
  ConlluReader reader(in, cfg.policy);
  std::size_t ordinal = 0;
  while (auto tree = reader.next()) {
    ++ordinal;
    try {
      const LabelSeq labels =
          with_polarity
              ? emit_multitask_labels(*tree, cfg.scheme, classify_sentence(*tree, *lex, rules).polarity)
              : encode(*tree, cfg.scheme);
      out << format_bridge_line(*tree, labels) << '\n';
    } catch (const EncodeError& e) {
      record_error(cfg.policy, {ordinal, 0, "sentence '" + tree->sentence_id + "': " + e.what()}, err,
                   "sentence");
    } catch (const TreeError& e) {
      record_error(cfg.policy, {ordinal, 0, "sentence '" + tree->sentence_id + "': " + e.what()}, err,
                   "sentence");
    }
  }
  report_errors(err, reader.errors(), "sentence");
  return kExitOk;
}

int cmd_decode(const PipelineConfig& cfg, Streams& io, std::ostream& err) {
  std::istream& in = io.input(cfg.input);
  std::ostream& out = io.output(cfg.output);
  TaggerOutputReader reader(in, cfg.scheme, cfg.policy);
  std::size_t sentences = 0;
  while (auto s = reader.next()) {
    write_conllu(out, s->tree);
    ++sentences;
  }
  report_errors(err, reader.errors(), "line");
  const RepairStats& r = reader.repairs();
  err << "decoded " << sentences << " sentences; repairs: " << r.total() << " (out_of_range "
      << r.out_of_range << ", extra_roots " << r.extra_roots << ", missing_root " << r.missing_root
      << ", cycles " << r.cycles << ", bracket_mismatches " << r.bracket_mismatches << ")\n";
  return kExitOk;
}

int cmd_eval(const std::string& gold_path, const std::string& pred_path, const std::string& pred_conllu,
             const PipelineConfig& cfg, Streams& io, std::ostream& err) {
  std::ifstream gold_in(gold_path);
  if (!gold_in) throw ConfigError("cannot open gold file '" + gold_path + "'");
  std::vector<RecordError> gold_errors;
  const std::vector<GoldRecord> gold = load_gold(gold_in, cfg.policy, &gold_errors);
  report_errors(err, gold_errors, "gold record");

  std::ifstream pred_in(pred_path);
  if (!pred_in) throw ConfigError("cannot open prediction file '" + pred_path + "'");
  std::unordered_map<std::string, Prediction> preds;
  std::string line;
  std::size_t line_no = 0, ordinal = 0;
  while (std::getline(pred_in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++ordinal;
    try {
      Prediction p = parse_prediction(line);
      std::string id = p.sentence_id;
      preds[id] = std::move(p);
    } catch (const EvalError& e) {
      record_error(cfg.policy, {ordinal, line_no, e.what()}, err, "prediction");
    }
  }

  std::unordered_map<std::string, const GoldRecord*> gold_by_id;
  for (const GoldRecord& g : gold) gold_by_id[g.sentence_id] = &g;
  for (const auto& [id, p] : preds) {
    if (!gold_by_id.count(id)) record_error(cfg.policy, {0, 0, "prediction for unknown sentence '" + id + "'"}, err, "prediction");
  }

  MetricsReport report;
  report.sentences = gold.size();
  SentenceAccumulator sentences;
  TargetAccumulator exact, overlapping;
  bool any_class = false, any_opinions = false;
  std::size_t convertible = 0, opinion_sets = 0;
  for (const GoldRecord& g : gold) {
    const auto it = preds.find(g.sentence_id);
    const Prediction* p = it == preds.end() ? nullptr : &it->second;
    if (g.gold_class) {
      if (p && p->polarity) {
        sentences.add(*p->polarity, *g.gold_class);
        any_class = true;
      } else {
        record_error(cfg.policy, {0, 0, "no sentence polarity predicted for '" + g.sentence_id + "'"}, err,
                     "sentence");
      }
    }
    if (g.has_opinions) {
      any_opinions = true;
      ++opinion_sets;
      report.opinions += g.gold_opinions.opinions.size();
      try {
        (void)to_tree(g.gold_opinions);
        ++convertible;
      } catch (const SentimentTreeError&) {
      }
      const OpinionSet empty{g.sentence_id, {}, {}};
      const OpinionSet& predicted = p && p->has_opinions ? p->opinions : empty;
      exact.add(predicted, g.gold_opinions, MatchMode::kExact);
      overlapping.add(predicted, g.gold_opinions, MatchMode::kOverlap);
    }
  }
  if (any_class) report.sentence = sentences.metrics();
  if (any_opinions) {
    report.targets_exact = exact.metrics();
    report.targets_overlap = overlapping.metrics();
  }
  report.conversion_coverage =
      opinion_sets == 0 ? 1.0 : static_cast<double>(convertible) / static_cast<double>(opinion_sets);

  if (!pred_conllu.empty()) {
    std::ifstream trees_in(pred_conllu);
    if (!trees_in) throw ConfigError("cannot open predicted CoNLL-U '" + pred_conllu + "'");
    std::vector<RecordError> tree_errors;
    const std::vector<DepTree> trees = read_conllu(trees_in, cfg.policy, &tree_errors);
    report_errors(err, tree_errors, "predicted tree");
    ParseAccumulator parse;
    for (std::size_t i = 0; i < trees.size(); ++i) {
      const auto it = gold_by_id.find(trees[i].sentence_id);
      if (it == gold_by_id.end() || !it->second->parse) {
        record_error(cfg.policy, {i + 1, 0, "no gold parse for sentence '" + trees[i].sentence_id + "'"}, err,
                     "predicted tree");
        continue;
      }
      try {
        parse.add(trees[i], *it->second->parse);
      } catch (const EvalError& e) {
        record_error(cfg.policy, {i + 1, 0, e.what()}, err, "predicted tree");
      }
    }
    report.parse = parse.metrics();
  }
  io.output(cfg.output) << metrics_to_json(report) << '\n';
  return kExitOk;
}

int cmd_bench(const PipelineConfig& cfg, std::size_t sentences, int length, bool warmup, bool has_input,
              Streams& io, std::ostream& err) {
  const PolarityLexicon lex = load_pipeline_lexicon(cfg);
  const RuleConfig rules = load_pipeline_rules(cfg);
  std::vector<DepTree> corpus;
  if (has_input) {
    std::vector<RecordError> errors;
    corpus = read_conllu(io.input(cfg.input), cfg.policy, &errors);
    report_errors(err, errors, "sentence");
  } else {
    if (length < 1) throw ConfigError("--length must be at least 1");
    corpus = synthetic_corpus(sentences, length, cfg.seed, lex);
  }
  if (corpus.size() < 1000) {
    err << "warning: corpus has " << corpus.size() << " sentences; timings below 1000 are noisy\n";
  }
  const BenchReport report = run_bench(corpus, lex, rules, {cfg.scheme, cfg.workers, warmup});
  io.output(cfg.output) << bench_to_json(report) << '\n';
  return kExitOk;
}

int cmd_gen(const PipelineConfig& cfg, std::size_t sentences, int length, Streams& io) {
  if (length < 1) throw ConfigError("--length must be at least 1");
  const PolarityLexicon lex = load_pipeline_lexicon(cfg);
  const std::vector<DepTree> corpus = synthetic_corpus(sentences, length, cfg.seed, lex);
  write_conllu(io.output(cfg.output), corpus);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Syntax-based sentiment analysis and dependency sequence labeling", "salsa"};
  app.require_subcommand(1);
  std::map<std::string, std::unique_ptr<Flags>> flags;
  auto sub = [&](const char* name, const char* help, unsigned want) {
    CLI::App* s = app.add_subcommand(name, help);
    flags[name] = std::make_unique<Flags>();
    add_flags(s, *flags[name], want);
    return s;
  };

  bool explain = false, baseline = false, aspects_explain = false, with_polarity = false;
  CLI::App* analyze_cmd = sub("analyze", "CoNLL-U in, one JSON report line per sentence out",
                              kLexicon | kRules | kIo | kWorkers);
  analyze_cmd->add_flag("--explain", explain, "include rule traces");
  analyze_cmd->add_flag("--baseline", baseline, "word-count baseline instead of the rules");
  CLI::App* aspects_cmd = sub("aspects", "like analyze, but only target opinions",
                              kLexicon | kRules | kIo | kWorkers);
  aspects_cmd->add_flag("--explain", aspects_explain, "include rule traces");
  CLI::App* encode_cmd = sub("encode", "CoNLL-U to tagger-bridge lines", kLexicon | kRules | kIo | kScheme);
  encode_cmd->add_flag("--with-polarity", with_polarity, "append the sentence class to the last label");
  CLI::App* decode_cmd = sub("decode", "tagger-bridge lines to CoNLL-U", kIo | kScheme);

  std::string gold_path, pred_path, pred_conllu;
  CLI::App* eval_cmd = sub("eval", "score predictions against gold JSON lines", kIo);
  eval_cmd->add_option("--gold", gold_path, "gold JSON-lines file")->required();
  eval_cmd->add_option("--pred", pred_path, "predictions: gold-format or analyze report lines")->required();
  eval_cmd->add_option("--pred-conllu", pred_conllu, "predicted trees for UAS/LAS");

  std::size_t sentences = 10000;
  int length = 20;
  bool no_warmup = false;
  CLI::App* bench_cmd = sub("bench", "throughput of read, decode and rules",
                            kLexicon | kRules | kIo | kScheme | kWorkers | kSeed);
  bench_cmd->add_option("-n,--sentences", sentences, "synthetic corpus size");
  bench_cmd->add_option("--length", length, "synthetic sentence length");
  bench_cmd->add_flag("--no-warmup", no_warmup, "time the first pass too");
  std::size_t gen_sentences = 1000;
  int gen_length = 20;
  CLI::App* gen_cmd = sub("gen", "write a synthetic CoNLL-U corpus", kLexicon | kIo | kSeed);
  gen_cmd->add_option("-n,--sentences", gen_sentences, "number of sentences");
  gen_cmd->add_option("--length", gen_length, "tokens per sentence");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  }

  Streams io(in, out);
  try {
    for (const auto& [name, f] : flags) {
      CLI::App* s = app.get_subcommand(name);
      if (!s->parsed()) continue;
      const PipelineConfig cfg = f->resolve();
      if (s == analyze_cmd) return cmd_analyze(cfg, explain, baseline, ReportMode::kFull, io, err);
      if (s == aspects_cmd) return cmd_analyze(cfg, aspects_explain, false, ReportMode::kAspects, io, err);
      if (s == encode_cmd) return cmd_encode(cfg, with_polarity, io, err);
      if (s == decode_cmd) return cmd_decode(cfg, io, err);
      if (s == eval_cmd) return cmd_eval(gold_path, pred_path, pred_conllu, cfg, io, err);
      if (s == bench_cmd) {
        const bool has_input = bench_cmd->get_option("--input")->count() > 0 || cfg.input != "-";
        return cmd_bench(cfg, sentences, length, !no_warmup, has_input, io, err);
      }
      if (s == gen_cmd) return cmd_gen(cfg, gen_sentences, gen_length, io);
    }
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
  return kExitConfigError;
}

}  // namespace salsa
