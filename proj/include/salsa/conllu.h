#ifndef SALSA_CONLLU_H_
#define SALSA_CONLLU_H_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "salsa/tree.h"

namespace salsa {

enum class ErrorPolicy { kSkip, kAbort };

// A sentence- or record-level input problem. Ordinals are 1-based.
struct RecordError {
  std::size_t ordinal = 0;
  std::size_t line = 0;
  std::string message;
};

class DataError : public std::runtime_error {
 public:
  explicit DataError(RecordError error);
  const RecordError& error() const { return error_; }

 private:
  RecordError error_;
};

// Streaming CoNLL-U reader. Only ID, FORM, LEMMA, UPOS, HEAD and DEPREL are
// retained. Multiword ranges and empty nodes are dropped and tallied.
// Under kSkip a malformed sentence is recorded in errors() and skipped; under
// kAbort next() throws DataError.
class ConlluReader {
 public:
  explicit ConlluReader(std::istream& in, ErrorPolicy policy = ErrorPolicy::kSkip);

  std::optional<DepTree> next();

  const std::vector<RecordError>& errors() const { return errors_; }
  std::size_t dropped_multiword() const { return dropped_multiword_; }
  std::size_t dropped_empty_nodes() const { return dropped_empty_; }

 private:
  struct Block {
    std::vector<std::string> lines;
    std::size_t first_line = 0;
  };
  bool read_block(Block& block);
  std::optional<DepTree> parse_block(const Block& block, RecordError& error);

  std::istream& in_;
  ErrorPolicy policy_;
  std::size_t line_no_ = 0;
  std::size_t ordinal_ = 0;
  std::size_t dropped_multiword_ = 0;
  std::size_t dropped_empty_ = 0;
  std::vector<RecordError> errors_;
};

std::vector<DepTree> read_conllu(std::istream& in, ErrorPolicy policy = ErrorPolicy::kSkip,
                                 std::vector<RecordError>* errors = nullptr);

// Throws TreeError if the tree violates DepTree invariants; nothing is
// written in that case.
void write_conllu(std::ostream& out, const DepTree& tree);

// Writes every valid tree; returns the indices of refused ones.
std::vector<std::size_t> write_conllu(std::ostream& out, std::span<const DepTree> trees);

std::string to_conllu(const DepTree& tree);

}  // namespace salsa

#endif  // SALSA_CONLLU_H_
