#ifndef SALSA_PIPELINE_H_
#define SALSA_PIPELINE_H_

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include "salsa/conllu.h"
#include "salsa/eval.h"
#include "salsa/lexicon.h"
#include "salsa/rules.h"
#include "salsa/seqlabel.h"
#include "salsa/tree.h"

namespace salsa {

// Bad flags, unreadable files, invalid lexicons or rule files.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PipelineConfig {
  std::string language = "en";
  std::string lexicon;         // empty: <language>.tsv on the lexicon search path
  std::string domain_lexicon;  // optional overlay
  std::string collocations;    // empty: <language>.colloc.tsv if it exists
  std::string rules;           // empty: RuleConfig defaults
  Scheme scheme = Scheme::kRelOffset;
  std::string input = "-";
  std::string output = "-";
  ErrorPolicy policy = ErrorPolicy::kSkip;
  int workers = 1;
  std::uint64_t seed = 1;

  // Throws ConfigError.
  void validate() const;
};

// Applies "key = value" lines over `cfg`. Keys match the field names; the
// policy is "skip" or "abort". Throws ConfigError.
void apply_pipeline_config(std::istream& in, PipelineConfig& cfg);
void apply_pipeline_config_file(const std::string& path, PipelineConfig& cfg);

// Directories searched for lexicon files: $SALSA_LEXICON_DIR, then the
// data directory the project was built with.
std::vector<std::string> lexicon_search_path();

// A path that exists as given wins; a relative path is otherwise looked up on
// the lexicon search path. Returns nullopt if nothing matches.
std::optional<std::string> resolve_lexicon_path(const std::string& path);

// Base lexicon plus collocations and optional domain overlay. Throws ConfigError.
PolarityLexicon load_pipeline_lexicon(const PipelineConfig& cfg);
RuleConfig load_pipeline_rules(const PipelineConfig& cfg);

// Applies fn to every item with a fixed pool of `workers` threads pulling
// batches of `batch` items. Results keep input order. The first exception
// thrown by fn is rethrown after all workers stop.
template <typename T, typename Fn>
auto parallel_map(std::span<const T> items, int workers, Fn fn, std::size_t batch = 64)
    -> std::vector<std::invoke_result_t<Fn&, const T&>> {
  using R = std::invoke_result_t<Fn&, const T&>;
  std::vector<R> out(items.size());
  if (workers <= 1 || items.size() <= batch) {
    for (std::size_t i = 0; i < items.size(); ++i) out[i] = fn(items[i]);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mu;
  auto work = [&]() {
    while (!failed.load(std::memory_order_relaxed)) {
      const std::size_t start = next.fetch_add(batch);
      if (start >= items.size()) return;
      const std::size_t stop = std::min(items.size(), start + batch);
      try {
        for (std::size_t i = start; i < stop; ++i) out[i] = fn(items[i]);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(workers),
                                                (items.size() + batch - 1) / batch);
    for (std::size_t w = 0; w < n; ++w) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);
  return out;
}

enum class ReportMode { kFull, kAspects };

// One JSON object (single line, no trailing newline) per analyzed sentence.
// Traces are included only when `explain` is set; kAspects keeps opinions only.
std::string result_to_json(const DepTree& tree, const SentimentResult& result, ReportMode mode,
                           bool explain);
std::string baseline_to_json(const DepTree& tree, const BaselineScore& score);

// A prediction line: either a gold-format record or an analyze report record.
struct Prediction {
  std::string sentence_id;
  std::optional<Polarity> polarity;
  bool has_opinions = false;
  OpinionSet opinions;
};

// Throws EvalError.
Prediction parse_prediction(const std::string& json_line);

// Projective trees of `length` tokens whose words come from the lexicon's
// vocabulary plus neutral fillers. Deterministic for a given seed.
std::vector<DepTree> synthetic_corpus(std::size_t sentences, int length, std::uint64_t seed,
                                      const PolarityLexicon& lex);

struct BenchOptions {
  Scheme scheme = Scheme::kRelOffset;
  int workers = 1;
  bool warmup = true;
};

struct BenchReport {
  std::size_t sentences = 0;
  std::size_t tokens = 0;
  int workers = 1;
  Scheme scheme = Scheme::kRelOffset;
  double read_seconds = 0.0;    // parsing tagger-bridge lines
  double decode_seconds = 0.0;  // labels to trees, with repair
  double rules_seconds = 0.0;   // analyze
  double total_seconds = 0.0;
  double sentences_per_second = 0.0;
  double tokens_per_second = 0.0;
  double decode_analyze_per_second = 0.0;  // sentences / (decode + rules)
  std::size_t repairs = 0;
  std::optional<long> peak_rss_kb;
};

// Encodes the corpus into tagger-bridge lines (untimed), then times reading,
// decoding and rule analysis. The warmup pass runs the same work once and is
// not counted.
BenchReport run_bench(std::span<const DepTree> corpus, const PolarityLexicon& lex,
                      const RuleConfig& rules, const BenchOptions& options);

std::string bench_to_json(const BenchReport& report, int indent = 2);

std::optional<long> peak_rss_kb();

}  // namespace salsa

#endif  // SALSA_PIPELINE_H_
