#pragma once

#include <stdexcept>
#include <string>

namespace tokenwarp {

enum class ErrorCode {
  kInvalidArgument,
  kNonPositiveDepth,
  kInvalidDepth,
  kIndivisibleResolution,
  kDimensionMismatch,
  kEmptyDepth,
  kDegenerateDirection,
  kNegativeScale,
  kInvalidDepthAtKeypoint,
  kMarkerOutOfBounds,
  kNonPlanarScene,
  kNonRigidPose,
  kParseError,
  kIoError,
  kBadMagic,
  kUnsupportedVersion,
  kTruncatedFile,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace tokenwarp
