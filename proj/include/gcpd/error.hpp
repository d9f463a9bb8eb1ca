#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gcpd {

enum class ErrorKind {
  InvalidArgument,
  DimensionMismatch,
  NotPositiveDefinite,
  EmptySample,
  SingularDesign,
  ZeroJump,
  SegmentTooShort,
  HorizonTooSmall,
  ReferenceHasZeros,
  MissingColumn,
  EmptyAfterFilter,
  Io,
};

std::string_view to_string(ErrorKind kind);

// Numerical failures are distinguished from user errors so the CLI can
// report them with different exit codes.
bool is_numerical(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorKind::InvalidArgument, what);
}

}  // namespace gcpd
