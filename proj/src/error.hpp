#pragma once

#include <stdexcept>
#include <string>

namespace novikov {

enum class ErrorKind {
  InvalidInput,     // malformed or inconsistent user data
  SpecMismatch,     // elements or complexes from different groups
  Unsupported,      // outside the supported group / fixture classes
  BudgetExceeded,   // support, size or retry caps hit
  Positivity,       // a Novikov-positivity precondition could not be certified
  Inconclusive,     // doubling retries exhausted
  InvalidInverse,   // caller-supplied inverse fails its identity
  WrongComplex,     // certificate hash does not match the complex
  InvalidQuotient,  // finite quotient images do not define a homomorphism
  Internal,         // an exact post-condition failed: arithmetic bug
};

const char *to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

} // namespace novikov
