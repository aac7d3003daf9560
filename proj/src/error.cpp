#include "error.hpp"

namespace novikov {

const char *to_string(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::InvalidInput:
    return "invalid-input";
  case ErrorKind::SpecMismatch:
    return "spec-mismatch";
  case ErrorKind::Unsupported:
    return "unsupported";
  case ErrorKind::BudgetExceeded:
    return "budget-exceeded";
  case ErrorKind::Positivity:
    return "positivity";
  case ErrorKind::Inconclusive:
    return "inconclusive";
  case ErrorKind::InvalidInverse:
    return "invalid-inverse";
  case ErrorKind::WrongComplex:
    return "wrong-complex";
  case ErrorKind::InvalidQuotient:
    return "invalid-quotient";
  case ErrorKind::Internal:
    return "internal-error";
  }
  return "unknown";
}

} // namespace novikov
