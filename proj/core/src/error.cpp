#include "orl/error.hpp"

namespace orl {

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::usage:
    case ErrorKind::io:
      return 1;
    case ErrorKind::validation:
      return 2;
    case ErrorKind::numerical:
      return 3;
  }
  return 1;
}

}  // namespace orl
