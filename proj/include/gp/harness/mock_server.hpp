#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "gp/dataset/sample.hpp"

namespace httplib {
class Server;
}

namespace gp::harness {

/// How the mock model answers.
///   oracle                  centre of the ground-truth bbox
///   fixed:X,Y               the same resized-frame point for every request
///   offset:D[:v1,v2,...]    centre shifted by (D, D) screenshot pixels for
///                           the listed variants (all when omitted), centre
///                           for the rest; shifted by (-D, -D) instead when
///                           (D, D) leaves the screenshot
/// `malformed_rate` replaces that fraction of answers (chosen by a hash of
/// the sample id) with text no parser accepts.
struct MockBehavior {
  enum class Mode { Oracle, Fixed, Offset };
  Mode mode = Mode::Oracle;
  Point fixed;
  double offset = 100;
  std::set<VariantKind> offset_variants;
  double malformed_rate = 0;

  /// Throws InvalidArgument.
  static MockBehavior parse(std::string_view spec);
};

/// OpenAI-compatible chat-completions endpoint that answers from a dataset's
/// ground truth. The request's image identifies the screenshot and the
/// instruction text in the prompt identifies the sample; the answer is
/// formatted in the family style detected from the prompt.
class MockModelServer {
 public:
  MockModelServer(const dataset::Dataset& dataset, MockBehavior behavior);
  ~MockModelServer();
  MockModelServer(const MockModelServer&) = delete;
  MockModelServer& operator=(const MockModelServer&) = delete;

  /// Binds (port 0 picks a free port) and serves on a background thread.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  /// Blocks until stop() is called from another thread or a signal handler.
  void wait();
  void stop();

  int port() const { return port_; }
  /// Base URL for HttpBackendOptions::endpoint.
  std::string endpoint() const;
  std::size_t requests() const { return requests_; }

  /// Request handler without the transport, for tests.
  nlohmann::json respond(const nlohmann::json& request) const;

 private:
  struct Indexed {
    const dataset::SampleRecord* sample;
    Size image;
  };

  std::string answer(const nlohmann::json& request) const;

  const dataset::Dataset& dataset_;
  MockBehavior behavior_;
  std::map<std::string, std::vector<Indexed>> by_image_;  // sha256 of resized PNG
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
  std::string host_;
  mutable std::atomic<std::size_t> requests_{0};
};

}  // namespace gp::harness
