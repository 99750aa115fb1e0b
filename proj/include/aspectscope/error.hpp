#pragma once

#include <stdexcept>
#include <string>

namespace aspectscope {

enum class ErrorCode {
  kInvalidArgument,
  kNotFound,
  kIo,
  kIngestion,
  kTraining,
  kNotArtifact,
  kCorrupt,
  kUnsupportedVersion,
  kKindMismatch,
  kUnavailable,
  kInternal,
};

const char* error_code_name(ErrorCode code);

// All library failures surface as this exception; the C API maps the code
// onto an asc_status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace aspectscope
