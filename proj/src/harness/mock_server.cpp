#include <httplib.h>

#include "gp/harness/mock_server.hpp"

#include <cmath>

#include "gp/browser/session.hpp"
#include "gp/core/error.hpp"
#include "gp/core/io.hpp"
#include "gp/core/log.hpp"
#include "gp/harness/model.hpp"
#include "gp/harness/resize.hpp"
#include "gp/harness/runner.hpp"

namespace gp::harness {

using nlohmann::json;

MockBehavior MockBehavior::parse(std::string_view spec) {
  MockBehavior b;
  const auto bad = [&] {
    return Error(ErrorCode::InvalidArgument, "unknown mock behavior '" + std::string(spec) + "'");
  };
  if (spec == "oracle") return b;
  try {
    if (spec.rfind("fixed:", 0) == 0) {
      const std::string rest(spec.substr(6));
      const auto comma = rest.find(',');
      if (comma == std::string::npos) throw bad();
      b.mode = Mode::Fixed;
      b.fixed = {std::stod(rest.substr(0, comma)), std::stod(rest.substr(comma + 1))};
      return b;
    }
    if (spec.rfind("offset:", 0) == 0) {
      const std::string rest(spec.substr(7));
      const auto colon = rest.find(':');
      b.mode = Mode::Offset;
      b.offset = std::stod(rest.substr(0, colon));
      if (colon != std::string::npos) {
        std::string list = rest.substr(colon + 1);
        std::size_t start = 0;
        while (start <= list.size()) {
          const auto end = std::min(list.find(',', start), list.size());
          b.offset_variants.insert(parse_variant_kind(list.substr(start, end - start)));
          start = end + 1;
        }
      }
      return b;
    }
  } catch (const std::logic_error&) {
    throw bad();
  }
  throw bad();
}

MockModelServer::MockModelServer(const dataset::Dataset& dataset, MockBehavior behavior)
    : dataset_(dataset), behavior_(std::move(behavior)) {
  // Shots are content-addressed, so several samples may share one image.
  std::map<std::string, std::pair<std::string, Size>> by_file;
  for (const auto& s : dataset_.samples) {
    auto it = by_file.find(s.screenshot);
    if (it == by_file.end()) {
      const std::string png = read_file(dataset_.screenshot_path(s));
      const Size dims = browser::png_dimensions(png);
      const ResizePlan plan = smart_resize(dims.height, dims.width);
      it = by_file.emplace(s.screenshot, std::make_pair(sha256_hex(resize_png(png, plan)), dims)).first;
    }
    by_image_[it->second.first].push_back({&s, it->second.second});
  }
}

MockModelServer::~MockModelServer() { stop(); }

namespace {

constexpr const char* kMalformed = "I cannot find the element on this screen.";

void collect_text(const json& content, std::string& text, std::string& image_url) {
  if (content.is_string()) {
    text += content.get<std::string>();
    text += "\n";
    return;
  }
  if (!content.is_array()) return;
  for (const auto& part : content) {
    const std::string type = part.value("type", "");
    if (type == "text") {
      text += part.value("text", "");
      text += "\n";
    } else if (type == "image_url" && image_url.empty()) {
      image_url = part.at("image_url").value("url", "");
    }
  }
}

ModelFamily detect_family(const std::string& prompt) {
  if (prompt.find("computer_use") != std::string::npos) return ModelFamily::Qwen;
  if (prompt.find("start_box") != std::string::npos) return ModelFamily::UiTars;
  return ModelFamily::Gta1;
}

double unit_hash(const std::string& key) {
  return static_cast<double>(std::stoull(sha256_hex(key).substr(0, 12), nullptr, 16)) / static_cast<double>(1ULL << 48);
}

}  // namespace

std::string MockModelServer::answer(const json& request) const {
  std::string prompt;
  std::string image_url;
  for (const auto& m : request.at("messages")) {
    if (m.contains("content")) collect_text(m["content"], prompt, image_url);
  }
  const ModelFamily family = detect_family(prompt);
  const bool reasoning = prompt.find("Thought:") != std::string::npos;

  constexpr std::string_view kPrefix = "data:image/png;base64,";
  if (image_url.rfind(kPrefix, 0) != 0) return kMalformed;
  const std::string png = base64_decode(std::string_view(image_url).substr(kPrefix.size()));
  const auto it = by_image_.find(sha256_hex(png));
  if (it == by_image_.end()) {
    log::warn("mock: image not in dataset");
    return kMalformed;
  }

  // The longest instruction found in the prompt wins, so "Click on the
  // button" cannot shadow "Click on the button below 'Email'".
  const Indexed* best = nullptr;
  std::size_t best_len = 0;
  for (const auto& entry : it->second) {
    const dataset::SampleRecord& s = *entry.sample;
    for (const std::string* text : {&s.instruction_direct, s.instruction_relational ? &*s.instruction_relational : nullptr}) {
      if (text && text->size() > best_len && prompt.find(*text) != std::string::npos) {
        best = &entry;
        best_len = text->size();
      }
    }
  }
  if (!best) {
    log::warn("mock: no sample instruction found in the prompt");
    return kMalformed;
  }
  const dataset::SampleRecord& s = *best->sample;
  if (behavior_.malformed_rate > 0 && unit_hash(dataset::sample_id(s)) < behavior_.malformed_rate) {
    return kMalformed;
  }

  const ResizePlan plan = smart_resize(best->image.height, best->image.width);
  Point resized;
  if (behavior_.mode == MockBehavior::Mode::Fixed) {
    resized = behavior_.fixed;
  } else {
    Point target = s.bbox.center();
    const bool shift = behavior_.mode == MockBehavior::Mode::Offset &&
                       (behavior_.offset_variants.empty() || behavior_.offset_variants.count(s.variant));
    if (shift) {
      const double d = behavior_.offset;
      const bool fits = target.x + d <= best->image.width && target.y + d <= best->image.height;
      target = fits ? Point{target.x + d, target.y + d} : Point{target.x - d, target.y - d};
    }
    const Point p = map_to_resized(target, plan);
    resized = {std::round(p.x), std::round(p.y)};
  }
  return format_response(family, resized, reasoning);
}

json MockModelServer::respond(const json& request) const {
  ++requests_;
  const std::string text = answer(request);
  return json{{"id", "mock-" + std::to_string(requests_.load())},
              {"object", "chat.completion"},
              {"model", request.value("model", "mock")},
              {"choices", json::array({{{"index", 0},
                                        {"message", {{"role", "assistant"}, {"content", text}}},
                                        {"finish_reason", "stop"}}})}};
}

int MockModelServer::start(const std::string& host, int port) {
  server_ = std::make_unique<httplib::Server>();
  host_ = host;
  const auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    const json body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.contains("messages")) {
      res.status = 400;
      res.set_content(R"({"error":"invalid request body"})", "application/json");
      return;
    }
    try {
      res.set_content(respond(body).dump(), "application/json");
    } catch (const std::exception& e) {
      res.status = 500;
      res.set_content(json{{"error", e.what()}}.dump(), "application/json");
    }
  };
  server_->Post("/v1/chat/completions", handler);
  server_->Post("/chat/completions", handler);
  port_ = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (port_ <= 0) throw Error(ErrorCode::IoError, "mock server cannot bind " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  return port_;
}

void MockModelServer::wait() {
  if (thread_.joinable()) thread_.join();
}

void MockModelServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

std::string MockModelServer::endpoint() const {
  return "http://" + host_ + ":" + std::to_string(port_) + "/v1";
}

}  // namespace gp::harness
