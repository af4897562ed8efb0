#pragma once

#include <stdexcept>
#include <string>

namespace sasadmm {

/// Invalid solver configuration (bad stepsizes, violated structural
/// assumptions, unsupported subproblem).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// File or stream failure.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed input text. `line` is 1-based; 0 when the whole input is at fault.
struct ParseError : IoError {
  ParseError(long line_no, std::string tok, const std::string& what)
      : IoError("line " + std::to_string(line_no) + ": " + what + (tok.empty() ? "" : " (token \"" + tok + "\")")),
        line(line_no),
        token(std::move(tok)) {}
  long line;
  std::string token;
};

}  // namespace sasadmm
