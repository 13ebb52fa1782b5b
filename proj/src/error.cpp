#include "psiart/error.hpp"

namespace psiart {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::InvalidState: return "InvalidState";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::EmptyCandidates: return "EmptyCandidates";
    case ErrorKind::NotFound: return "NotFound";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::VersionError: return "VersionError";
    case ErrorKind::CorruptSnapshot: return "CorruptSnapshot";
    case ErrorKind::Busy: return "Busy";
  }
  return "Unknown";
}

}  // namespace psiart
