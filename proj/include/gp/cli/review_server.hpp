#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include <nlohmann/json.hpp>

#include "gp/dataset/review.hpp"
#include "gp/dataset/sample.hpp"

namespace httplib {
class Server;
}

namespace gp::cli {

struct ReviewServerOptions {
  std::filesystem::path dataset_dir;
  std::filesystem::path decisions_path;  // empty: <dataset>/decisions.jsonl
  std::optional<std::filesystem::path> ui_dir;  // built UI bundle, served at /
};

/// HTTP API for the human review of generated samples:
///   GET  /api/steps?status=pending|accepted|rejected
///   GET  /api/step/{task}/{step}
///   GET  /shots/{file}
///   POST /api/decision
///   GET  /api/export
/// The dataset is read-only; decisions go to the append-only log.
class ReviewServer {
 public:
  explicit ReviewServer(const ReviewServerOptions& options);
  ~ReviewServer();
  ReviewServer(const ReviewServer&) = delete;
  ReviewServer& operator=(const ReviewServer&) = delete;

  /// Binds (port 0 picks a free port) and serves on a background thread.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  void wait();
  void stop();
  int port() const { return port_; }

  // Handlers without the transport. Each returns (status, JSON body).
  std::pair<int, nlohmann::json> list_steps(const std::string& status_filter) const;
  std::pair<int, nlohmann::json> get_step(const std::string& task_id, const std::string& step_id) const;
  std::pair<int, nlohmann::json> post_decision(const std::string& body);
  nlohmann::json export_manifest() const;

 private:
  nlohmann::json variant_states(const std::string& task_id, const std::string& step_id) const;

  dataset::Dataset dataset_;
  std::unique_ptr<dataset::DecisionLog> log_;
  std::optional<std::filesystem::path> ui_dir_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace gp::cli
