#pragma once

// Newline-delimited JSON protocol for driving an external point tracker in a
// child process over its standard streams. See docs/bridge-protocol.md for
// the grammar and tests/data/golden_transcript.ndjson for a recorded session.
//
// Requests and responses strictly alternate: one request line in, one
// response line out, never more than one request in flight.

#include <chrono>
#include <cstdint>
#include <istream>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ktrack/error.hpp"
#include "ktrack/trackers.hpp"
#include "ktrack/types.hpp"

namespace ktrack {

namespace protocol {

inline constexpr int kVersion = 1;

struct HelloAck {
  int protocol_version = 0;
  std::string tracker_name;
  double cost_hint_ms = 0.0;
};

std::string encode_hello(std::span<const PointId> ids, FrameBounds bounds);
std::string encode_track(std::int64_t frame, std::span<const PointId> ids,
                         const std::optional<std::string>& frame_payload_path = std::nullopt);

/// Parses a hello response. Throws Protocol on malformed content,
/// TrackerError for an error response, UnsupportedVersion on version mismatch.
HelloAck decode_hello_ack(std::string_view line);

/// Parses a trackResult for `frame`, returning one Measurement per requested
/// id in request order. The whole line is rejected (Protocol) when it is
/// malformed, echoes another frame, or has missing, duplicate or unknown ids.
std::vector<Measurement> decode_track_result(std::string_view line, std::int64_t frame,
                                             std::span<const PointId> requested);

/// Replays a recorded transcript ("> " request / "< " response lines) through
/// the decoders and returns the measurement batches it contains.
std::vector<std::vector<Measurement>> replay_transcript(std::istream& in);

}  // namespace protocol

struct BridgeOptions {
  std::chrono::milliseconds handshake_timeout{10'000};
  std::chrono::milliseconds request_timeout{30'000};
  bool record_transcript = false;
};

class BridgeSession {
 public:
  /// Spawns `command` through /bin/sh and performs the hello handshake.
  /// Throws SessionOpen on spawn failure or handshake timeout, and
  /// UnsupportedVersion when the adapter speaks another protocol version.
  static std::unique_ptr<BridgeSession> open(const std::string& command,
                                             std::span<const PointId> ids, FrameBounds bounds,
                                             BridgeOptions options = {});

  ~BridgeSession();
  BridgeSession(const BridgeSession&) = delete;
  BridgeSession& operator=(const BridgeSession&) = delete;

  /// One track request. Timeouts and a dead child throw Transport; contract
  /// violations throw Protocol; an adapter error response throws
  /// TrackerError. After any of these the session is unusable.
  std::vector<Measurement> track(std::int64_t frame, std::span<const PointId> ids,
                                 const std::optional<std::string>& frame_payload_path = std::nullopt);

  const std::string& tracker_name() const { return ack_.tracker_name; }
  double cost_hint_ms() const { return ack_.cost_hint_ms; }
  std::chrono::microseconds handshake_latency() const { return handshake_latency_; }
  std::int64_t requests() const { return requests_; }
  /// Recorded lines ("> " sent, "< " received) when record_transcript is on.
  const std::vector<std::string>& transcript() const { return transcript_; }

 private:
  BridgeSession() = default;
  void send_line(const std::string& line);
  std::string read_line(std::chrono::milliseconds timeout, ErrorKind on_timeout);
  void shutdown() noexcept;

  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  BridgeOptions options_;
  protocol::HelloAck ack_;
  std::chrono::microseconds handshake_latency_{0};
  std::int64_t requests_ = 0;
  bool broken_ = false;
  std::vector<std::string> transcript_;
};

}  // namespace ktrack
