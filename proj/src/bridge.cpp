#include "ktrack/bridge.hpp"

#include <csignal>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <mutex>
#include <thread>
#include <unordered_map>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "ktrack/error.hpp"

namespace ktrack {
namespace protocol {
namespace {

using nlohmann::json;

json parse_line(std::string_view line) {
  json j = json::parse(line.begin(), line.end(), nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    fail(ErrorKind::Protocol, "bridge: malformed message: " + std::string(line.substr(0, 200)));
  }
  if (j["type"] == "error") {
    const std::string code = j.value("code", std::string("unknown"));
    const std::string message = j.value("message", std::string());
    throw TrackerError(code, "tracker reported error " + code + ": " + message);
  }
  return j;
}

std::int64_t int_field(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end() || !it->is_number_integer()) {
    fail(ErrorKind::Protocol, std::string("bridge: missing integer field '") + name + "'");
  }
  return it->get<std::int64_t>();
}

}  // namespace

std::string encode_hello(std::span<const PointId> ids, FrameBounds bounds) {
  json j = {{"type", "hello"},
            {"protocolVersion", kVersion},
            {"pointIds", std::vector<PointId>(ids.begin(), ids.end())},
            {"frameBounds", {{"width", bounds.width}, {"height", bounds.height}}}};
  return j.dump();
}

std::string encode_track(std::int64_t frame, std::span<const PointId> ids,
                         const std::optional<std::string>& frame_payload_path) {
  json j = {{"type", "track"},
            {"frame", frame},
            {"pointIds", std::vector<PointId>(ids.begin(), ids.end())}};
  if (frame_payload_path) j["framePayloadPath"] = *frame_payload_path;
  return j.dump();
}

HelloAck decode_hello_ack(std::string_view line) {
  const json j = parse_line(line);
  if (j["type"] != "helloAck") {
    fail(ErrorKind::Protocol, "bridge: expected helloAck, got " + j["type"].get<std::string>());
  }
  HelloAck ack;
  ack.protocol_version = static_cast<int>(int_field(j, "protocolVersion"));
  if (ack.protocol_version != kVersion) {
    fail(ErrorKind::UnsupportedVersion,
         "bridge: adapter speaks protocol version " + std::to_string(ack.protocol_version) +
             ", expected " + std::to_string(kVersion));
  }
  ack.tracker_name = j.value("trackerName", std::string("external"));
  const auto cost = j.find("costHintMs");
  if (cost != j.end()) {
    if (!cost->is_number() || !(cost->get<double>() >= 0.0)) {
      fail(ErrorKind::Protocol, "bridge: costHintMs must be a non-negative number");
    }
    ack.cost_hint_ms = cost->get<double>();
  }
  return ack;
}

std::vector<Measurement> decode_track_result(std::string_view line, std::int64_t frame,
                                             std::span<const PointId> requested) {
  const json j = parse_line(line);
  if (j["type"] != "trackResult") {
    fail(ErrorKind::Protocol, "bridge: expected trackResult, got " + j["type"].get<std::string>());
  }
  const std::int64_t echoed = int_field(j, "frame");
  if (echoed != frame) {
    fail(ErrorKind::Protocol, "bridge: response for frame " + std::to_string(echoed) +
                                  " to a request for frame " + std::to_string(frame));
  }
  const auto ms = j.find("measurements");
  if (ms == j.end() || !ms->is_array()) fail(ErrorKind::Protocol, "bridge: missing measurements");

  std::unordered_map<PointId, std::size_t> slot;
  slot.reserve(requested.size());
  for (std::size_t i = 0; i < requested.size(); ++i) slot.emplace(requested[i], i);

  std::vector<Measurement> out(requested.size());
  std::vector<bool> seen(requested.size(), false);
  for (const auto& m : *ms) {
    if (!m.is_object()) fail(ErrorKind::Protocol, "bridge: measurement is not an object");
    const PointId id = int_field(m, "pointId");
    auto it = slot.find(id);
    if (it == slot.end()) {
      fail(ErrorKind::Protocol, "bridge: unrequested point id " + std::to_string(id));
    }
    if (seen[it->second]) fail(ErrorKind::Protocol, "bridge: duplicate point id " + std::to_string(id));
    seen[it->second] = true;

    const auto valid = m.find("valid");
    if (valid == m.end() || !valid->is_boolean()) {
      fail(ErrorKind::Protocol, "bridge: measurement without boolean 'valid'");
    }
    Measurement& out_m = out[it->second];
    out_m.point_id = id;
    out_m.valid = valid->get<bool>();
    if (out_m.valid) {
      const auto x = m.find("x");
      const auto y = m.find("y");
      if (x == m.end() || y == m.end() || !x->is_number() || !y->is_number()) {
        fail(ErrorKind::Protocol, "bridge: valid measurement without numeric x/y");
      }
      out_m.x = x->get<double>();
      out_m.y = y->get<double>();
      if (!std::isfinite(out_m.x) || !std::isfinite(out_m.y)) {
        fail(ErrorKind::Protocol, "bridge: non-finite coordinates");
      }
    }
  }
  for (std::size_t i = 0; i < requested.size(); ++i) {
    if (!seen[i]) {
      fail(ErrorKind::Protocol, "bridge: response omits point id " + std::to_string(requested[i]));
    }
  }
  return out;
}

std::vector<std::vector<Measurement>> replay_transcript(std::istream& in) {
  std::vector<std::vector<Measurement>> batches;
  std::optional<json> request;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line.size() < 2 || (line[0] != '>' && line[0] != '<') || line[1] != ' ') {
      fail(ErrorKind::Parse, "transcript: line must start with '> ' or '< '");
    }
    const std::string_view body = std::string_view(line).substr(2);
    if (line[0] == '>') {
      if (request) fail(ErrorKind::Protocol, "transcript: two requests without a response");
      request = parse_line(body);
      continue;
    }
    if (!request) fail(ErrorKind::Protocol, "transcript: response without a request");
    if ((*request)["type"] == "hello") {
      decode_hello_ack(body);
    } else if ((*request)["type"] == "track") {
      const auto ids = (*request)["pointIds"].get<std::vector<PointId>>();
      batches.push_back(decode_track_result(body, int_field(*request, "frame"), ids));
    } else {
      fail(ErrorKind::Protocol, "transcript: unknown request type");
    }
    request.reset();
  }
  return batches;
}

}  // namespace protocol

namespace {

std::once_flag g_sigpipe_once;

void close_fd(int& fd) noexcept {
  if (fd >= 0) {
    ::close(fd);
    fd = -1;
  }
}

}  // namespace

std::unique_ptr<BridgeSession> BridgeSession::open(const std::string& command,
                                                   std::span<const PointId> ids,
                                                   FrameBounds bounds, BridgeOptions options) {
  // Writes to an adapter that already exited must fail with EPIPE, not kill us.
  std::call_once(g_sigpipe_once, [] { std::signal(SIGPIPE, SIG_IGN); });

  int in_pipe[2];
  int out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) {
    fail(ErrorKind::SessionOpen, std::string("bridge: pipe failed: ") + std::strerror(errno));
  }
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    fail(ErrorKind::SessionOpen, std::string("bridge: pipe failed: ") + std::strerror(errno));
  }
  const pid_t pid = ::fork();
  if (pid < 0) {
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) ::close(fd);
    fail(ErrorKind::SessionOpen, std::string("bridge: fork failed: ") + std::strerror(errno));
  }
  if (pid == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);

  std::unique_ptr<BridgeSession> s(new BridgeSession());
  s->pid_ = pid;
  s->to_child_ = in_pipe[1];
  s->from_child_ = out_pipe[0];
  s->options_ = options;

  const auto start = std::chrono::steady_clock::now();
  std::string reply;
  try {
    s->send_line(protocol::encode_hello(ids, bounds));
    reply = s->read_line(options.handshake_timeout, ErrorKind::SessionOpen);
  } catch (const Error& e) {
    fail(ErrorKind::SessionOpen, std::string("bridge: handshake with '") + command +
                                     "' failed: " + e.what());
  }
  s->ack_ = protocol::decode_hello_ack(reply);
  s->handshake_latency_ = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::steady_clock::now() - start);
  return s;
}

BridgeSession::~BridgeSession() { shutdown(); }

std::vector<Measurement> BridgeSession::track(std::int64_t frame, std::span<const PointId> ids,
                                              const std::optional<std::string>& payload) {
  if (broken_) fail(ErrorKind::Transport, "bridge: session is no longer usable");
  try {
    send_line(protocol::encode_track(frame, ids, payload));
    ++requests_;
    const std::string reply = read_line(options_.request_timeout, ErrorKind::Transport);
    return protocol::decode_track_result(reply, frame, ids);
  } catch (...) {
    broken_ = true;
    throw;
  }
}

void BridgeSession::send_line(const std::string& line) {
  if (options_.record_transcript) transcript_.push_back("> " + line);
  std::string data = line;
  data.push_back('\n');
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t n = ::write(to_child_, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      fail(ErrorKind::Transport, std::string("bridge: write failed: ") + std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
}

std::string BridgeSession::read_line(std::chrono::milliseconds timeout, ErrorKind on_timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (options_.record_transcript) transcript_.push_back("< " + line);
      return line;
    }
    const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (remaining.count() <= 0) {
      fail(on_timeout, "bridge: timed out after " + std::to_string(timeout.count()) + " ms");
    }
    pollfd pfd{from_child_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(remaining.count()));
    if (ready < 0) {
      if (errno == EINTR) continue;
      fail(ErrorKind::Transport, std::string("bridge: poll failed: ") + std::strerror(errno));
    }
    if (ready == 0) continue;
    char chunk[4096];
    const ssize_t n = ::read(from_child_, chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR) continue;
      fail(ErrorKind::Transport, std::string("bridge: read failed: ") + std::strerror(errno));
    }
    if (n == 0) fail(ErrorKind::Transport, "bridge: adapter closed its output");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

void BridgeSession::shutdown() noexcept {
  close_fd(to_child_);
  if (pid_ > 0) {
    int status = 0;
    bool reaped = false;
    for (int i = 0; i < 100 && !reaped; ++i) {
      reaped = ::waitpid(pid_, &status, WNOHANG) == pid_;
      if (!reaped) std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    if (!reaped) {
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, &status, 0);
    }
    pid_ = -1;
  }
  close_fd(from_child_);
}

}  // namespace ktrack
