#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cadret {

enum class ErrorKind {
  Contract,    // caller violated a precondition
  Domain,      // parameter outside an evaluation domain
  Shape,       // tensor shape mismatch
  Schema,      // attribute value does not match the attribute schema
  Spec,        // invalid generator / family specification
  Degenerate,  // zero-extent part, zero-norm vector
  Numeric,     // non-finite value guard
  Routing,     // type index outside a parameter bank
  Config,      // configuration inconsistent with data
  Format,      // malformed file contents
  Io,          // file system failure
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) throw Error(kind, message);
}

// Process exit status for an error: 3 for I/O, 2 for everything else.
int exit_code_for(ErrorKind kind) noexcept;

}  // namespace cadret
