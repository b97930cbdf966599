#include "cadret/core/error.hpp"

namespace cadret {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Contract: return "contract error";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::Shape: return "shape error";
    case ErrorKind::Schema: return "schema error";
    case ErrorKind::Spec: return "spec error";
    case ErrorKind::Degenerate: return "degenerate input";
    case ErrorKind::Numeric: return "numeric error";
    case ErrorKind::Routing: return "routing error";
    case ErrorKind::Config: return "config error";
    case ErrorKind::Format: return "format error";
    case ErrorKind::Io: return "I/O error";
  }
  return "error";
}

int exit_code_for(ErrorKind kind) noexcept { return kind == ErrorKind::Io ? 3 : 2; }

}  // namespace cadret
