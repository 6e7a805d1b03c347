#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace gp::browser {

using Json = nlohmann::json;
using Millis = std::chrono::milliseconds;

/// Command/response channel to a browser debugging endpoint. One call sends a
/// single command and blocks for its matching response; events are dropped.
///
/// `session_id` routes the command to an attached target (flat session mode);
/// empty means the browser-level target. Implementations return the
/// "result" object or throw gp::Error (ScriptError for protocol errors,
/// Timeout when the deadline passes).
class Transport {
 public:
  virtual ~Transport() = default;

  virtual Json call(std::string_view method, const Json& params,
                    const std::string& session_id, Millis timeout) = 0;
};

/// Connects to a DevTools websocket URL such as
/// ws://127.0.0.1:9222/devtools/browser/<id>. Throws Error{ConnectFailed}.
std::unique_ptr<Transport> connect_websocket(const std::string& url, Millis handshake_timeout);

}  // namespace gp::browser
