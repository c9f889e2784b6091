#pragma once

#include <stdexcept>
#include <string>

namespace ieppa {

enum class ErrorKind {
  kDimensionMismatch,
  kInvalidArgument,
  kDomain,
  kAssumptionViolated,  // overlapping or non-binary constraint tensors
  kZeroRhs,
  kUnderflow,           // multiplicative scheme lost range; retry in log domain
  kInnerCapExceeded,
  kInfeasible,
  kUnbounded,
  kSizeGuard,
  kIo,
  kParse,
};

const char* ErrorKindName(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void Fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace ieppa
