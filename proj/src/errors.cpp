#include "lipselect/errors.hpp"

namespace lipselect {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::identifier: return "identifier";
    case ErrorKind::configuration: return "configuration";
    case ErrorKind::schema: return "schema";
    case ErrorKind::shape: return "shape";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::parameter: return "parameter";
    case ErrorKind::range: return "range";
    case ErrorKind::rank_deficiency: return "rank-deficiency";
    case ErrorKind::convergence: return "convergence";
    case ErrorKind::degenerate_radius: return "degenerate-radius";
    case ErrorKind::rate: return "rate";
    case ErrorKind::invariant: return "invariant";
    case ErrorKind::resolution: return "resolution";
  }
  return "unknown";
}

}  // namespace lipselect
