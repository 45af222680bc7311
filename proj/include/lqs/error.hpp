#pragma once

#include <stdexcept>
#include <string>

namespace lqs {

/// Failure categories. The CLI maps several of these onto exit codes.
enum class ErrorKind {
  dimension,        ///< shape or dimension mismatch
  not_in_algebra,   ///< matrix is not skew-symplectic
  precondition,     ///< a documented precondition of the operation does not hold
  numerical,        ///< self-check of a numerical kernel failed (overflow, drift, ...)
  not_semisimple,   ///< eigenstructure is defective or too ill-conditioned
  classification,   ///< eigenvalue sits in an ambiguous band between axes
  undersampled,     ///< argument lift lost track of the winding
  parse             ///< malformed input file
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::not_in_algebra: return "not_in_algebra";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::numerical: return "numerical";
    case ErrorKind::not_semisimple: return "not_semisimple";
    case ErrorKind::classification: return "classification";
    case ErrorKind::undersampled: return "undersampled";
    case ErrorKind::parse: return "parse";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace lqs
