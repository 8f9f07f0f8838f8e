#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "loglin/program.hpp"

namespace loglin {

/// Parse failure with a 1-based source line (0 when the input is a bare
/// string such as a command-line query).
struct ParseError : std::runtime_error {
  int line;
  ParseError(int line_, const std::string& msg)
      : std::runtime_error(line_ > 0 ? "line " + std::to_string(line_) + ": " + msg : msg),
        line(line_) {}
};

/// Loads a program from its line-oriented text form:
///   `# ...`                     comment
///   `subtype <sub> <super>.`    hierarchy edge
///   `type <name>.`              isolated type symbol
///   `head :- b1, b2, ... .`     clause (or `head.` for an empty body)
/// Constraints are written `Var = type`; atoms `pred(V1, ..., Vk)`.
/// Variables begin with an uppercase letter, types and predicates with a
/// lowercase one. Throws ParseError or ValidationError.
Program load_program(const std::string& text);

/// Parses a query goal, conjuncts joined by `&`, e.g. `s(Z) & Z = a`.
/// Predicates and types must exist in the program.
Goal parse_goal(const std::string& text, const Program& p, int line = 0);

struct CorpusEntry {
  Goal goal;
  long count;
  int line;
};

/// Loads a query corpus: one `<count><TAB><goal>` line per query type.
/// Blank lines and `#` comments are skipped. Entries that differ only by
/// variable names are merged, summing their counts.
std::vector<CorpusEntry> load_corpus(const std::string& text, const Program& p);

}  // namespace loglin
