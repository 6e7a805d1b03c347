#include <httplib.h>

#include "gp/harness/client.hpp"

#include <cstdlib>
#include <regex>

#include "gp/core/error.hpp"

namespace gp::harness {

using nlohmann::json;

std::string completion_text(const json& response) {
  if (!response.contains("choices") || !response["choices"].is_array() || response["choices"].empty()) {
    throw Error(ErrorCode::RequestFailed, "response has no choices");
  }
  const json& message = response["choices"][0].value("message", json::object());
  std::string text;
  if (message.contains("content") && message["content"].is_string()) {
    text = message["content"].get<std::string>();
  }
  if (message.contains("tool_calls") && message["tool_calls"].is_array()) {
    for (const auto& call : message["tool_calls"]) {
      const json& fn = call.value("function", json::object());
      json arguments = fn.value("arguments", json::object());
      // OpenAI encodes arguments as a JSON string.
      if (arguments.is_string()) {
        arguments = json::parse(arguments.get<std::string>(), nullptr, false);
      }
      const json block = {{"name", fn.value("name", "")}, {"arguments", arguments}};
      if (!text.empty()) text += "\n";
      text += "<tool_call>\n" + block.dump() + "\n</tool_call>";
    }
  }
  return text;
}

namespace {

class HttpBackend final : public ChatBackend {
 public:
  explicit HttpBackend(HttpBackendOptions options) : options_(std::move(options)) {
    static const std::regex url(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(options_.endpoint, m, url)) {
      throw Error(ErrorCode::InvalidArgument, "malformed endpoint URL '" + options_.endpoint + "'");
    }
    origin_ = m[1];
    std::string prefix = m[2];
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    path_ = prefix + "/chat/completions";
  }

  ChatReply complete(const json& messages, const std::string& model) override {
    httplib::Client client(origin_);
    client.set_connection_timeout(10);
    client.set_read_timeout(options_.timeout_s);
    client.set_write_timeout(options_.timeout_s);
    httplib::Headers headers;
    if (!options_.api_key.empty()) headers.emplace("Authorization", "Bearer " + options_.api_key);
    const json body = {{"model", model},
                       {"messages", messages},
                       {"temperature", 0},
                       {"max_tokens", options_.max_tokens}};
    const auto res = client.Post(path_, headers, body.dump(), "application/json");
    if (!res) {
      throw Error(ErrorCode::EndpointUnreachable,
                  origin_ + ": " + httplib::to_string(res.error()));
    }
    if (res->status < 200 || res->status >= 300) {
      throw Error(ErrorCode::RequestFailed,
                  "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
    }
    const json parsed = json::parse(res->body, nullptr, false);
    if (parsed.is_discarded()) throw Error(ErrorCode::RequestFailed, "response body is not JSON");
    return {completion_text(parsed)};
  }

 private:
  HttpBackendOptions options_;
  std::string origin_;
  std::string path_;
};

}  // namespace

std::unique_ptr<ChatBackend> make_http_backend(const HttpBackendOptions& options) {
  return std::make_unique<HttpBackend>(options);
}

HttpBackendOptions resolve_http_options(const std::string& endpoint_flag, const std::string& api_key_env) {
  HttpBackendOptions options;
  options.endpoint = endpoint_flag;
  if (options.endpoint.empty()) {
    if (const char* base = std::getenv("GP_API_BASE")) options.endpoint = base;
  }
  if (options.endpoint.empty()) {
    throw Error(ErrorCode::InvalidArgument, "no endpoint: pass --endpoint or set GP_API_BASE");
  }
  if (!api_key_env.empty()) {
    if (const char* key = std::getenv(api_key_env.c_str())) options.api_key = key;
  }
  return options;
}

}  // namespace gp::harness
