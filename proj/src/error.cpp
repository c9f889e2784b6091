#include "ieppa/error.hpp"

namespace ieppa {

const char* ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDimensionMismatch:
      return "dimension_mismatch";
    case ErrorKind::kInvalidArgument:
      return "invalid_argument";
    case ErrorKind::kDomain:
      return "domain";
    case ErrorKind::kAssumptionViolated:
      return "assumption_violated";
    case ErrorKind::kZeroRhs:
      return "zero_rhs";
    case ErrorKind::kUnderflow:
      return "underflow";
    case ErrorKind::kInnerCapExceeded:
      return "inner_cap_exceeded";
    case ErrorKind::kInfeasible:
      return "infeasible";
    case ErrorKind::kUnbounded:
      return "unbounded";
    case ErrorKind::kSizeGuard:
      return "size_guard";
    case ErrorKind::kIo:
      return "io";
    case ErrorKind::kParse:
      return "parse";
  }
  return "unknown";
}

}  // namespace ieppa
