#ifndef INVFORGE_ERROR_HPP
#define INVFORGE_ERROR_HPP

// Error hierarchy.  Frontend and analysis errors carry a source position and
// format as "file:line:col: message"; solver errors are operational failures
// (the run aborts, they are never reported as verdicts).

#include <stdexcept>
#include <string>

#include "invforge/ast.hpp"

namespace invforge {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
  Error(const std::string& file, Pos pos, const std::string& msg)
      : std::runtime_error(format(file, pos, msg)), pos_(pos) {}

  Pos pos() const { return pos_; }

  static std::string format(const std::string& file, Pos pos, const std::string& msg) {
    std::string out = file.empty() ? "<input>" : file;
    out += ':';
    out += std::to_string(pos.line);
    out += ':';
    out += std::to_string(pos.col);
    out += ": ";
    out += msg;
    return out;
  }

 private:
  Pos pos_{};
};

// Lexical or syntax error.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Name-resolution or type error.
class TypeError : public Error {
 public:
  using Error::Error;
};

// Structural queries over programs (unresolved callee, bad loop id, ...).
class AnalysisError : public Error {
 public:
  using Error::Error;
};

// replace_nth past the occurrence count, or an ill-formed substitution.
class SubstError : public Error {
 public:
  using Error::Error;
};

// Solver subprocess failure: cannot launch, protocol garbage, broken pipe.
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace invforge

#endif  // INVFORGE_ERROR_HPP
