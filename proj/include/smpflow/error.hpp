#pragma once

#include <stdexcept>
#include <string>

namespace smpflow {

enum class ErrorKind {
  Validation,   // input violates a documented invariant
  Domain,       // evaluation outside the domain of a function
  Singular,     // singular or badly conditioned linear system
  Convergence,  // iterative procedure failed to converge
  Structure,    // an operator left the SMP class
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct ValidationError : Error {
  explicit ValidationError(const std::string& w) : Error(ErrorKind::Validation, w) {}
};
struct DomainError : Error {
  explicit DomainError(const std::string& w) : Error(ErrorKind::Domain, w) {}
};
struct SingularError : Error {
  explicit SingularError(const std::string& w) : Error(ErrorKind::Singular, w) {}
};
struct ConvergenceError : Error {
  explicit ConvergenceError(const std::string& w) : Error(ErrorKind::Convergence, w) {}
};
struct StructureError : Error {
  explicit StructureError(const std::string& w) : Error(ErrorKind::Structure, w) {}
};

}  // namespace smpflow
