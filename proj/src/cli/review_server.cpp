#include <httplib.h>

#include "gp/cli/review_server.hpp"

#include <regex>

#include "gp/core/error.hpp"
#include "gp/core/io.hpp"
#include "gp/core/log.hpp"

namespace gp::cli {

using nlohmann::json;

namespace {

json error_body(const std::string& message) { return {{"error", message}}; }

std::pair<std::string, std::string> split_key(const std::string& key) {
  const auto colon = key.find(':');
  return {key.substr(0, colon), key.substr(colon + 1)};
}

}  // namespace

ReviewServer::ReviewServer(const ReviewServerOptions& options)
    : dataset_(dataset::Dataset::load(options.dataset_dir)), ui_dir_(options.ui_dir) {
  const auto decisions =
      options.decisions_path.empty() ? options.dataset_dir / "decisions.jsonl" : options.decisions_path;
  log_ = std::make_unique<dataset::DecisionLog>(decisions, dataset_.samples);
}

ReviewServer::~ReviewServer() { stop(); }

json ReviewServer::variant_states(const std::string& task_id, const std::string& step_id) const {
  json states = json::object();
  for (const auto& s : dataset_.samples) {
    if (s.task_id != task_id || s.step_id != step_id || s.applied_spec.copy != 0) continue;
    const auto d = log_->latest(task_id, step_id, s.variant);
    states[std::string(to_string(s.variant))] = d ? (d->accepted ? "accepted" : "rejected") : "pending";
  }
  return states;
}

std::pair<int, json> ReviewServer::list_steps(const std::string& status_filter) const {
  std::optional<dataset::StepStatus> wanted;
  if (!status_filter.empty()) {
    try {
      wanted = dataset::parse_step_status(status_filter);
    } catch (const Error& e) {
      return {400, error_body(e.what())};
    }
  }
  json steps = json::array();
  for (const auto& key : log_->steps()) {
    const auto [task, step] = split_key(key);
    const auto status = log_->step_status(task, step);
    if (wanted && status != *wanted) continue;
    steps.push_back({{"key", key},
                     {"task_id", task},
                     {"step_id", step},
                     {"status", to_string(status)},
                     {"variants", variant_states(task, step)}});
  }
  return {200, {{"count", steps.size()}, {"steps", steps}}};
}

std::pair<int, json> ReviewServer::get_step(const std::string& task_id, const std::string& step_id) const {
  if (!log_->has_step(task_id, step_id)) {
    return {404, error_body("unknown step " + task_id + ":" + step_id)};
  }
  json variants = json::array();
  for (const VariantKind kind : kAllVariants) {
    for (const auto& s : dataset_.samples) {
      if (s.task_id != task_id || s.step_id != step_id || s.variant != kind || s.applied_spec.copy != 0) continue;
      const auto decision = log_->latest(task_id, step_id, kind);
      const auto opt = [](const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); };
      variants.push_back({{"variant", to_string(kind)},
                          {"sample_id", dataset::sample_id(s)},
                          {"screenshot_url", "/" + s.screenshot},
                          {"image_dims", s.image_dims},
                          {"bbox", s.bbox},
                          {"instruction_direct", s.instruction_direct},
                          {"instruction_relational", opt(s.instruction_relational)},
                          {"anchor_text", opt(s.anchor_text)},
                          {"direction", opt(s.direction)},
                          {"decision", decision ? json(*decision) : json(nullptr)}});
    }
  }
  return {200,
          {{"key", task_id + ":" + step_id},
           {"task_id", task_id},
           {"step_id", step_id},
           {"status", to_string(log_->step_status(task_id, step_id))},
           {"criteria", dataset::kReviewCriteria},
           {"variants", variants}}};
}

std::pair<int, json> ReviewServer::post_decision(const std::string& body) {
  const json parsed = json::parse(body, nullptr, false);
  if (parsed.is_discarded()) return {400, error_body("body is not JSON")};
  dataset::ReviewDecision d;
  try {
    d = dataset::parse_decision(parsed);
  } catch (const Error& e) {
    return {400, error_body(e.what())};
  }
  if (d.timestamp.empty()) d.timestamp = dataset::rfc3339_now();
  if (d.reviewer.empty()) d.reviewer = "anonymous";
  try {
    const auto status = log_->record(d);
    return {200, {{"decision", d}, {"accepted", d.accepted}, {"step_status", to_string(status)}}};
  } catch (const Error& e) {
    if (e.code() == ErrorCode::UnknownSample) return {404, error_body(e.what())};
    if (e.code() == ErrorCode::InvalidArgument) return {400, error_body(e.what())};
    throw;
  }
}

json ReviewServer::export_manifest() const {
  json steps = json::array();
  json ids = json::array();
  for (const auto& key : log_->steps()) {
    const auto [task, step] = split_key(key);
    if (log_->step_status(task, step) != dataset::StepStatus::Accepted) continue;
    steps.push_back(key);
    std::vector<std::string> step_ids;
    for (const auto& s : dataset_.samples) {
      if (s.task_id == task && s.step_id == step && s.applied_spec.copy == 0) step_ids.push_back(dataset::sample_id(s));
    }
    std::sort(step_ids.begin(), step_ids.end());
    for (auto& id : step_ids) ids.push_back(std::move(id));
  }
  return {{"count", steps.size()}, {"steps", steps}, {"sample_ids", ids}};
}

int ReviewServer::start(const std::string& host, int port) {
  server_ = std::make_unique<httplib::Server>();
  const auto reply = [](httplib::Response& res, const std::pair<int, json>& out) {
    res.status = out.first;
    res.set_content(out.second.dump(), "application/json");
  };
  server_->Get("/api/steps", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, list_steps(req.has_param("status") ? req.get_param_value("status") : ""));
  });
  server_->Get(R"(/api/step/([^/]+)/([^/]+))", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, get_step(req.matches[1], req.matches[2]));
  });
  server_->Get(R"(/shots/([0-9a-f]+\.png))", [this](const httplib::Request& req, httplib::Response& res) {
    const auto path = dataset_.dir / "shots" / std::string(req.matches[1]);
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) {
      res.status = 404;
      res.set_content(error_body("no such screenshot").dump(), "application/json");
      return;
    }
    res.set_content(read_file(path), "image/png");
  });
  server_->Post("/api/decision", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, post_decision(req.body));
  });
  server_->Get("/api/export", [this, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, {200, export_manifest()});
  });
  if (ui_dir_) {
    if (!server_->set_mount_point("/", ui_dir_->string())) {
      log::warn("UI directory not found: " + ui_dir_->string());
    }
  } else {
    server_->Get("/", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("Review API is running; no UI bundle configured (--ui-dir).\n", "text/plain");
    });
  }
  server_->set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string message = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      message = e.what();
    } catch (...) {
    }
    res.status = 500;
    res.set_content(error_body(message).dump(), "application/json");
  });

  port_ = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (port_ <= 0) throw Error(ErrorCode::IoError, "cannot bind " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  return port_;
}

void ReviewServer::wait() {
  if (thread_.joinable()) thread_.join();
}

void ReviewServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace gp::cli
