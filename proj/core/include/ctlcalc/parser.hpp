#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ctlcalc/syntax.hpp"

namespace ctlcalc {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, std::vector<std::string> expected, const std::string& message);

  std::size_t line;
  std::size_t column;
  // What the parser would have accepted at this point; empty for semantic errors.
  std::vector<std::string> expected;
};

/// Parses one closed program of calculus `c`. Calculus violations (foreign
/// constructors, free variables, duplicate clauses) are reported as
/// ParseError at the offending subterm.
Term parse_program(std::string_view text, Calculus c);

// Any phrase, value or computation, with no calculus or closedness check.
Term parse_term(std::string_view text);

// The `;; calculus: <name>` header, if the text has one.
std::optional<Calculus> header_calculus(std::string_view text);

struct SourceFile {
  Term program;
  Calculus calculus;
};

// Calculus taken from `c` when given, else from the header.
SourceFile parse_source(std::string_view text, std::optional<Calculus> c);

/// Canonical text of a label-free term. Throws std::invalid_argument if a
/// runtime label or a labeled computation occurs in t.
std::string print_program(const Term& t);

}  // namespace ctlcalc
