#include "lesvote/error.hpp"

namespace lesvote {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::symmetry: return "symmetry";
    case ErrorKind::singular: return "singular";
    case ErrorKind::parameter: return "parameter";
    case ErrorKind::insufficient_data: return "insufficient_data";
    case ErrorKind::blocking: return "blocking";
    case ErrorKind::not_psd: return "not_psd";
    case ErrorKind::feasibility: return "feasibility";
    case ErrorKind::convergence: return "convergence";
    case ErrorKind::shape: return "shape";
    case ErrorKind::degenerate_data: return "degenerate_data";
    case ErrorKind::value: return "value";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

}  // namespace lesvote
