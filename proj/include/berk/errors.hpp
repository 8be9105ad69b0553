#pragma once

#include <stdexcept>
#include <string>

namespace berk {

// Error contract used across the library and mirrored by the CLI exit codes:
// a precondition_error means the caller handed us invalid data (exit 1),
// an invariant_error means a certified internal property failed (exit 2).
class precondition_error : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class invariant_error : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw precondition_error(msg);
}

inline void ensure(bool cond, const std::string& msg) {
  if (!cond) throw invariant_error(msg);
}

}  // namespace berk
