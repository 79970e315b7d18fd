#include "salsa/conllu.h"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

namespace salsa {

namespace {

std::string describe(const RecordError& e) {
  std::string out;
  if (e.ordinal > 0) out += "record " + std::to_string(e.ordinal);
  if (e.line > 0) out += (out.empty() ? "line " : ", line ") + std::to_string(e.line);
  return out.empty() ? e.message : out + ": " + e.message;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

DataError::DataError(RecordError error)
    : std::runtime_error(describe(error)), error_(std::move(error)) {}

ConlluReader::ConlluReader(std::istream& in, ErrorPolicy policy) : in_(in), policy_(policy) {}

bool ConlluReader::read_block(Block& block) {
  block.lines.clear();
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      if (block.lines.empty()) continue;
      return true;
    }
    if (block.lines.empty()) block.first_line = line_no_;
    block.lines.push_back(std::move(line));
  }
  return !block.lines.empty();
}

std::optional<DepTree> ConlluReader::parse_block(const Block& block, RecordError& error) {
  DepTree tree;
  std::vector<std::size_t> token_lines;
  error.line = block.first_line;
  for (std::size_t i = 0; i < block.lines.size(); ++i) {
    const std::string& line = block.lines[i];
    const std::size_t line_no = block.first_line + i;
    if (line.front() == '#') {
      tree.comments.push_back(line.substr(1));
      continue;
    }
    const auto fields = split_tabs(line);
    if (fields.size() != 10) {
      error.line = line_no;
      error.message = "malformed line: expected 10 columns, found " + std::to_string(fields.size());
      return std::nullopt;
    }
    if (fields[0].find('-') != std::string_view::npos) {
      ++dropped_multiword_;
      continue;
    }
    if (fields[0].find('.') != std::string_view::npos) {
      ++dropped_empty_;
      continue;
    }
    Token t;
    if (!parse_int(fields[0], t.id)) {
      error.line = line_no;
      error.message = "non-numeric id '" + std::string(fields[0]) + "'";
      return std::nullopt;
    }
    if (!parse_int(fields[6], t.head)) {
      error.line = line_no;
      error.message = "non-numeric head '" + std::string(fields[6]) + "'";
      return std::nullopt;
    }
    t.form = fields[1];
    t.lemma = fields[2];
    t.upos = fields[3];
    t.deprel = fields[7];
    tree.tokens.push_back(std::move(t));
    token_lines.push_back(line_no);
  }
  if (tree.tokens.empty()) return std::nullopt;

  const int n = static_cast<int>(tree.tokens.size());
  for (std::size_t i = 0; i < tree.tokens.size(); ++i) {
    const Token& t = tree.tokens[i];
    if (t.id != static_cast<int>(i) + 1) {
      error.line = token_lines[i];
      error.message = "token ids are not contiguous: expected " + std::to_string(i + 1) +
                      ", found " + std::to_string(t.id);
      return std::nullopt;
    }
    if (t.head < 0 || t.head > n) {
      error.line = token_lines[i];
      error.message = "head out of range: token " + std::to_string(t.id) + " has head " +
                      std::to_string(t.head) + " in a sentence of " + std::to_string(n);
      return std::nullopt;
    }
  }
  if (auto problem = validation_error(tree)) {
    error.message = *problem;
    return std::nullopt;
  }
  tree.sentence_id = tree.meta("sent_id").value_or("");
  return tree;
}

std::optional<DepTree> ConlluReader::next() {
  Block block;
  while (read_block(block)) {
    RecordError error;
    const std::size_t ordinal = ordinal_ + 1;
    error.ordinal = ordinal;
    std::optional<DepTree> tree = parse_block(block, error);
    if (tree) {
      ordinal_ = ordinal;
      return tree;
    }
    if (error.message.empty()) continue;  // comment-only block
    ordinal_ = ordinal;
    if (policy_ == ErrorPolicy::kAbort) throw DataError(error);
    errors_.push_back(std::move(error));
  }
  return std::nullopt;
}

std::vector<DepTree> read_conllu(std::istream& in, ErrorPolicy policy,
                                 std::vector<RecordError>* errors) {
  ConlluReader reader(in, policy);
  std::vector<DepTree> out;
  while (auto tree = reader.next()) out.push_back(std::move(*tree));
  if (errors) *errors = reader.errors();
  return out;
}

void write_conllu(std::ostream& out, const DepTree& tree) {
  if (auto problem = validation_error(tree)) {
    throw TreeError("refusing to serialize invalid tree: " + *problem);
  }
  std::string buf;
  if (!tree.sentence_id.empty() && !tree.meta("sent_id")) {
    buf += "# sent_id = " + tree.sentence_id + "\n";
  }
  for (const std::string& c : tree.comments) {
    buf += '#';
    buf += c;
    buf += '\n';
  }
  auto field = [&buf](const std::string& s) {
    buf += s.empty() ? std::string("_") : s;
    buf += '\t';
  };
  for (const Token& t : tree.tokens) {
    buf += std::to_string(t.id);
    buf += '\t';
    field(t.form);
    field(t.lemma);
    field(t.upos);
    buf += "_\t_\t";
    buf += std::to_string(t.head);
    buf += '\t';
    field(t.deprel);
    buf += "_\t_\n";
  }
  buf += '\n';
  out << buf;
}

std::vector<std::size_t> write_conllu(std::ostream& out, std::span<const DepTree> trees) {
  std::vector<std::size_t> refused;
  for (std::size_t i = 0; i < trees.size(); ++i) {
    if (!is_valid(trees[i])) {
      refused.push_back(i);
      continue;
    }
    write_conllu(out, trees[i]);
  }
  return refused;
}

std::string to_conllu(const DepTree& tree) {
  std::ostringstream out;
  write_conllu(out, tree);
  return out.str();
}

}  // namespace salsa
