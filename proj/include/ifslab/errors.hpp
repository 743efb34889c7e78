#pragma once

#include <stdexcept>
#include <string>

namespace ifslab {

enum class ErrorKind { domain, precondition, numerical, resource, usage, io };

/// Process exit code for each error class (0 is success).
constexpr int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::usage: return 2;
    case ErrorKind::io: return 3;
    case ErrorKind::numerical: return 4;
    case ErrorKind::domain:
    case ErrorKind::precondition:
    case ErrorKind::resource: return 5;
  }
  return 1;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return ifslab::exit_code(kind_); }

 private:
  ErrorKind kind_;
};

#define IFSLAB_ERROR_CLASS(Name, Kind) \
  class Name : public Error {          \
   public:                             \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
  };

IFSLAB_ERROR_CLASS(DomainError, domain)
IFSLAB_ERROR_CLASS(PreconditionError, precondition)
IFSLAB_ERROR_CLASS(NumericalError, numerical)
IFSLAB_ERROR_CLASS(ResourceError, resource)
IFSLAB_ERROR_CLASS(UsageError, usage)
IFSLAB_ERROR_CLASS(IoError, io)

#undef IFSLAB_ERROR_CLASS

}  // namespace ifslab
