#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tmt {

enum class ErrorKind {
  MissingField,
  ReservedName,
  DuplicateName,
  IncompleteDelta,
  UnknownToken,
  InvalidDeclaration,
  IndexOutOfRange,
  ArityMismatch,
  DimsMismatch,
  NotCharacteristic,
  ResourceLimit,
  InvalidArgument,
  MalformedDump,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MissingField: return "MissingField";
    case ErrorKind::ReservedName: return "ReservedName";
    case ErrorKind::DuplicateName: return "DuplicateName";
    case ErrorKind::IncompleteDelta: return "IncompleteDelta";
    case ErrorKind::UnknownToken: return "UnknownToken";
    case ErrorKind::InvalidDeclaration: return "InvalidDeclaration";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::DimsMismatch: return "DimsMismatch";
    case ErrorKind::NotCharacteristic: return "NotCharacteristic";
    case ErrorKind::ResourceLimit: return "ResourceLimit";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::MalformedDump: return "MalformedDump";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace tmt
