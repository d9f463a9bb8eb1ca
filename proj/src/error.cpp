#include "gcpd/error.hpp"

namespace gcpd {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::EmptySample: return "EmptySample";
    case ErrorKind::SingularDesign: return "SingularDesign";
    case ErrorKind::ZeroJump: return "ZeroJump";
    case ErrorKind::SegmentTooShort: return "SegmentTooShort";
    case ErrorKind::HorizonTooSmall: return "HorizonTooSmall";
    case ErrorKind::ReferenceHasZeros: return "ReferenceHasZeros";
    case ErrorKind::MissingColumn: return "MissingColumn";
    case ErrorKind::EmptyAfterFilter: return "EmptyAfterFilter";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

bool is_numerical(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotPositiveDefinite:
    case ErrorKind::SingularDesign:
    case ErrorKind::ZeroJump:
    case ErrorKind::SegmentTooShort:
    case ErrorKind::HorizonTooSmall:
      return true;
    default:
      return false;
  }
}

}  // namespace gcpd
