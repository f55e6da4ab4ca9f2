#include "geodesics/error.hpp"

namespace geodesics {

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::usage: return 1;
    case ErrorKind::data_integrity: return 2;
    case ErrorKind::statistical_precondition: return 3;
    case ErrorKind::numerical: return 4;
  }
  return 1;
}

const char* kind_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::usage: return "usage";
    case ErrorKind::data_integrity: return "data_integrity";
    case ErrorKind::statistical_precondition: return "statistical_precondition";
    case ErrorKind::numerical: return "numerical";
  }
  return "unknown";
}

}  // namespace geodesics
