#pragma once

#include <stdexcept>
#include <string>

namespace psiart {

enum class ErrorKind {
  InvalidInput,
  InvalidState,
  InsufficientData,
  EmptyCandidates,
  NotFound,
  IoError,
  VersionError,
  CorruptSnapshot,
  Busy,
};

const char* to_string(ErrorKind kind);

// Single exception type for the engine; callers branch on kind().
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

}  // namespace psiart
