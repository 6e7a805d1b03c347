#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gp {

enum class ErrorCode {
  // mhtml-archive
  MalformedMime,
  NoHtmlPart,
  DecodeError,
  IoError,
  // browser-session
  BrowserNotFound,
  ConnectFailed,
  LoadTimeout,
  NavigationFailed,
  ScriptError,
  Timeout,
  // perturbation
  ThemeNotFound,
  TargetLost,
  AmbiguousTarget,
  InvalidSpec,
  // instruction-gen
  CoincidentCenters,
  NoDominantAxis,
  NoAnchorAvailable,
  MissingTemplate,
  // dataset-store
  StepRejected,
  InsufficientPool,
  TeacherUnavailable,
  UnknownSample,
  // model-harness
  AspectRatioExceeded,
  UnknownFamily,
  ParseFailed,
  PointOutOfRange,
  EndpointUnreachable,
  RequestFailed,
  // robustness-stats / report
  NoOverlap,
  DegenerateProportion,
  NoParsedPoints,
  MissingBaseline,
  NoRelationalRecords,
  UnknownMode,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Exception type used across the toolkit. Carries a machine-readable code and,
/// for parser errors, the byte offset into the input where the problem was
/// detected.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> offset = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> offset() const noexcept { return offset_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> offset_;
};

}  // namespace gp
