#include "biaxframe/error.hpp"

namespace biaxframe {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidFrame: return "invalid frame";
    case ErrorKind::kDimension: return "dimension mismatch";
    case ErrorKind::kIndex: return "index out of range";
    case ErrorKind::kParameter: return "parameter error";
    case ErrorKind::kConfiguration: return "configuration error";
    case ErrorKind::kStability: return "stability error";
    case ErrorKind::kDivergence: return "divergence";
    case ErrorKind::kDegeneracy: return "degenerate frame";
    case ErrorKind::kUndefinedRatio: return "undefined ratio";
    case ErrorKind::kIo: return "I/O error";
    case ErrorKind::kFormat: return "format error";
  }
  return "error";
}

}  // namespace biaxframe
