#include "ktrack/error.hpp"

namespace ktrack {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::DegenerateUpdate: return "DegenerateUpdate";
    case ErrorKind::LookaheadUnavailable: return "LookaheadUnavailable";
    case ErrorKind::UndefinedMetric: return "UndefinedMetric";
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorKind::Io: return "Io";
    case ErrorKind::Protocol: return "Protocol";
    case ErrorKind::Transport: return "Transport";
    case ErrorKind::TrackerReported: return "TrackerReported";
    case ErrorKind::SessionOpen: return "SessionOpen";
    case ErrorKind::NothingToPlot: return "NothingToPlot";
  }
  return "Unknown";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameter:
    case ErrorKind::InvalidSpec:
      return 3;
    case ErrorKind::Parse:
    case ErrorKind::UnsupportedVersion:
    case ErrorKind::Io:
      return 4;
    case ErrorKind::Protocol:
    case ErrorKind::Transport:
    case ErrorKind::TrackerReported:
    case ErrorKind::SessionOpen:
      return 5;
    case ErrorKind::UndefinedMetric:
      return 6;
    case ErrorKind::DegenerateUpdate:
    case ErrorKind::LookaheadUnavailable:
    case ErrorKind::NothingToPlot:
      return 7;
  }
  return 1;
}

}  // namespace ktrack
