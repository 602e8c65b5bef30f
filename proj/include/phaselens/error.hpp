#pragma once

#include <stdexcept>
#include <string>

namespace phaselens {

enum class ErrorCode {
  DimensionMismatch,
  Incompatible,
  NotAFrame,
  EnumerationCapExceeded,
  FieldMismatch,
  SingularTransform,
  InvalidArgument,
  Parse,
};

const char* to_string(ErrorCode code);

// All library failures surface as this exception; `code()` tells the CLI
// which exit status to use.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace phaselens
