#include "gp/core/error.hpp"

namespace gp {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedMime: return "MalformedMime";
    case ErrorCode::NoHtmlPart: return "NoHtmlPart";
    case ErrorCode::DecodeError: return "DecodeError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::BrowserNotFound: return "BrowserNotFound";
    case ErrorCode::ConnectFailed: return "ConnectFailed";
    case ErrorCode::LoadTimeout: return "LoadTimeout";
    case ErrorCode::NavigationFailed: return "NavigationFailed";
    case ErrorCode::ScriptError: return "ScriptError";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::ThemeNotFound: return "ThemeNotFound";
    case ErrorCode::TargetLost: return "TargetLost";
    case ErrorCode::AmbiguousTarget: return "AmbiguousTarget";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::CoincidentCenters: return "CoincidentCenters";
    case ErrorCode::NoDominantAxis: return "NoDominantAxis";
    case ErrorCode::NoAnchorAvailable: return "NoAnchorAvailable";
    case ErrorCode::MissingTemplate: return "MissingTemplate";
    case ErrorCode::StepRejected: return "StepRejected";
    case ErrorCode::InsufficientPool: return "InsufficientPool";
    case ErrorCode::TeacherUnavailable: return "TeacherUnavailable";
    case ErrorCode::UnknownSample: return "UnknownSample";
    case ErrorCode::AspectRatioExceeded: return "AspectRatioExceeded";
    case ErrorCode::UnknownFamily: return "UnknownFamily";
    case ErrorCode::ParseFailed: return "ParseFailed";
    case ErrorCode::PointOutOfRange: return "PointOutOfRange";
    case ErrorCode::EndpointUnreachable: return "EndpointUnreachable";
    case ErrorCode::RequestFailed: return "RequestFailed";
    case ErrorCode::NoOverlap: return "NoOverlap";
    case ErrorCode::DegenerateProportion: return "DegenerateProportion";
    case ErrorCode::NoParsedPoints: return "NoParsedPoints";
    case ErrorCode::MissingBaseline: return "MissingBaseline";
    case ErrorCode::NoRelationalRecords: return "NoRelationalRecords";
    case ErrorCode::UnknownMode: return "UnknownMode";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

namespace {

std::string format_message(ErrorCode code, const std::string& message,
                           std::optional<std::size_t> offset) {
  std::string out(to_string(code));
  if (offset) out += " at byte " + std::to_string(*offset);
  if (!message.empty()) out += ": " + message;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message,
             std::optional<std::size_t> offset)
    : std::runtime_error(format_message(code, message, offset)),
      code_(code),
      offset_(offset) {}

}  // namespace gp
