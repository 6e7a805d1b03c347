#include <boost/asio/connect.hpp>
#include <boost/asio/io_context.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include <mutex>
#include <regex>

#include "gp/browser/transport.hpp"
#include "gp/core/error.hpp"

namespace gp::browser {

namespace {

namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

class WebSocketTransport final : public Transport {
 public:
  WebSocketTransport(const std::string& host, const std::string& port, const std::string& path,
                     Millis handshake_timeout)
      : ws_(ioc_) {
    beast::error_code ec;
    tcp::resolver resolver(ioc_);
    const auto endpoints = resolver.resolve(host, port, ec);
    if (ec) throw Error(ErrorCode::ConnectFailed, "resolve " + host + ": " + ec.message());

    bool done = false;
    beast::get_lowest_layer(ws_).async_connect(
        endpoints, [&](beast::error_code e, const tcp::endpoint&) {
          ec = e;
          done = true;
        });
    ioc_.run_for(handshake_timeout);
    if (!done || ec) {
      throw Error(ErrorCode::ConnectFailed,
                  "tcp connect to " + host + ":" + port + ": " + (done ? ec.message() : "timed out"));
    }
    ws_.read_message_max(512 * 1024 * 1024);
    ws_.handshake(host + ":" + port, path, ec);
    if (ec) throw Error(ErrorCode::ConnectFailed, "websocket handshake: " + ec.message());
  }

  ~WebSocketTransport() override {
    beast::error_code ec;
    if (!broken_) ws_.close(websocket::close_code::normal, ec);
  }

  Json call(std::string_view method, const Json& params, const std::string& session_id,
            Millis timeout) override {
    std::lock_guard lock(mutex_);
    if (broken_) throw Error(ErrorCode::ConnectFailed, "connection is closed");

    const int id = next_id_++;
    Json message = {{"id", id}, {"method", method}, {"params", params}};
    if (!session_id.empty()) message["sessionId"] = session_id;

    beast::error_code ec;
    ws_.text(true);
    ws_.write(net::buffer(message.dump()), ec);
    if (ec) {
      broken_ = true;
      throw Error(ErrorCode::ConnectFailed, "write: " + ec.message());
    }

    const auto deadline = std::chrono::steady_clock::now() + timeout;
    while (true) {
      beast::flat_buffer buffer;
      bool done = false;
      ws_.async_read(buffer, [&](beast::error_code e, std::size_t) {
        ec = e;
        done = true;
      });
      ioc_.restart();
      const auto remaining = deadline - std::chrono::steady_clock::now();
      ioc_.run_for(std::max<std::chrono::steady_clock::duration>(remaining, Millis(1)));
      if (!done) {
        // A cancelled websocket read leaves the stream unusable.
        broken_ = true;
        beast::get_lowest_layer(ws_).cancel();
        ioc_.restart();
        ioc_.run();
        throw Error(ErrorCode::Timeout, std::string(method) + " exceeded deadline");
      }
      if (ec) {
        broken_ = true;
        throw Error(ErrorCode::ConnectFailed, "read: " + ec.message());
      }
      Json reply = Json::parse(beast::buffers_to_string(buffer.data()), nullptr, false);
      if (reply.is_discarded() || !reply.contains("id") || reply["id"] != id) continue;
      if (reply.contains("error")) {
        throw Error(ErrorCode::ScriptError,
                    std::string(method) + ": " + reply["error"].value("message", "protocol error"));
      }
      return reply.value("result", Json::object());
    }
  }

 private:
  net::io_context ioc_;
  websocket::stream<beast::tcp_stream> ws_;
  std::mutex mutex_;
  int next_id_ = 1;
  bool broken_ = false;
};

}  // namespace

std::unique_ptr<Transport> connect_websocket(const std::string& url, Millis handshake_timeout) {
  static const std::regex kUrl(R"(^ws://([^:/]+):(\d+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, kUrl)) {
    throw Error(ErrorCode::ConnectFailed, "not a ws:// endpoint: " + url);
  }
  const std::string path = m[3].matched ? m[3].str() : "/";
  return std::make_unique<WebSocketTransport>(m[1].str(), m[2].str(), path, handshake_timeout);
}

}  // namespace gp::browser
