#pragma once

#include <stdexcept>
#include <string>

namespace dcf {

// Caller handed us arguments that violate a documented precondition.
struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// An object whose existence is implied by a satisfied applicability check
// could not be found. This is never a caller error: it means either a bug
// or an instance outside the algorithm's guarantee, and the message carries
// a textual repro of the offending state.
struct GuaranteeViolation : std::logic_error {
  using std::logic_error::logic_error;
};

// A bounded search ran out of its node budget before reaching a verdict.
struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  ParseError(std::string msg, int line, int col)
      : std::runtime_error(std::move(msg)), line(line), col(col) {}
  int line;
  int col;
};

}  // namespace dcf
