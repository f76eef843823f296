#pragma once

#include <stdexcept>
#include <string>

namespace sspec {

enum class ErrorKind {
  DimensionMismatch,
  Domain,          // argument outside the function's domain (branch cut, divergence)
  SingularSphere,  // evaluation point on the singular sphere of a kernel
  Precondition,
  Solver,
  Parse,
  Budget,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace sspec
