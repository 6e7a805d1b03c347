#pragma once

#include <memory>
#include <string>

#include <nlohmann/json.hpp>

namespace gp::harness {

struct ChatReply {
  /// Assistant text. Tool calls are rendered as "<tool_call>{json}</tool_call>"
  /// blocks so every family's parser sees plain text.
  std::string text;
};

/// One chat-completion round trip. Implementations throw Error with
/// EndpointUnreachable for transport failures (connection refused, timeout)
/// and RequestFailed for HTTP-level errors; only the former is retried.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual ChatReply complete(const nlohmann::json& messages, const std::string& model) = 0;
};

struct HttpBackendOptions {
  /// Base URL of an OpenAI-compatible API, e.g. "http://127.0.0.1:8000/v1".
  std::string endpoint;
  std::string api_key;  // empty: no Authorization header
  int timeout_s = 120;
  int max_tokens = 512;
};

std::unique_ptr<ChatBackend> make_http_backend(const HttpBackendOptions& options);

/// Resolves the endpoint (flag, else GP_API_BASE) and key (env var named by
/// `api_key_env`). Throws InvalidArgument when no endpoint is available.
HttpBackendOptions resolve_http_options(const std::string& endpoint_flag,
                                        const std::string& api_key_env);

/// Text of the first choice of an OpenAI-style chat completion response.
/// Throws RequestFailed when the body has no choices.
std::string completion_text(const nlohmann::json& response);

}  // namespace gp::harness
