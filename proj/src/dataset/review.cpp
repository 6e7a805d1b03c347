#include "gp/dataset/review.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include "gp/core/error.hpp"
#include "gp/core/io.hpp"

namespace gp::dataset {

using nlohmann::json;

namespace {

std::string decision_key(const std::string& task, const std::string& step, VariantKind v) {
  return task + ":" + step + ":" + std::string(to_string(v));
}

bool all_true(const std::array<bool, 5>& c) {
  for (bool b : c) {
    if (!b) return false;
  }
  return true;
}

}  // namespace

void to_json(json& j, const ReviewDecision& d) {
  j = json{{"task_id", d.task_id},
           {"step_id", d.step_id},
           {"variant", to_string(d.variant)},
           {"criteria", d.criteria},
           {"accepted", d.accepted},
           {"reviewer", d.reviewer},
           {"timestamp", d.timestamp}};
  if (d.failure_tag) j["failure_tag"] = *d.failure_tag;
}

ReviewDecision parse_decision(const json& j) {
  const auto fail = [](const std::string& why) -> ReviewDecision {
    throw Error(ErrorCode::InvalidArgument, "invalid decision: " + why);
  };
  if (!j.is_object()) return fail("body must be a JSON object");
  ReviewDecision d;
  for (const char* key : {"task_id", "step_id", "variant"}) {
    if (!j.contains(key) || !j[key].is_string()) return fail(std::string(key) + " must be a string");
  }
  d.task_id = j["task_id"].get<std::string>();
  d.step_id = j["step_id"].get<std::string>();
  try {
    d.variant = parse_variant_kind(j["variant"].get<std::string>());
  } catch (const Error& e) {
    return fail(e.what());
  }
  const auto criteria = j.find("criteria");
  if (criteria == j.end() || !criteria->is_array() || criteria->size() != 5) {
    return fail("criteria must be an array of 5 booleans");
  }
  for (std::size_t i = 0; i < 5; ++i) {
    if (!(*criteria)[i].is_boolean()) return fail("criteria must be an array of 5 booleans");
    d.criteria[i] = (*criteria)[i].get<bool>();
  }
  const bool conjunction = all_true(d.criteria);
  if (j.contains("accepted")) {
    if (!j["accepted"].is_boolean()) return fail("accepted must be a boolean");
    d.accepted = j["accepted"].get<bool>();
    if (d.accepted != conjunction) return fail("accepted must equal the conjunction of criteria");
  } else {
    d.accepted = conjunction;
  }
  if (j.contains("reviewer")) {
    if (!j["reviewer"].is_string()) return fail("reviewer must be a string");
    d.reviewer = j["reviewer"].get<std::string>();
  }
  if (j.contains("timestamp")) {
    if (!j["timestamp"].is_string()) return fail("timestamp must be a string");
    d.timestamp = j["timestamp"].get<std::string>();
  }
  if (j.contains("failure_tag") && !j["failure_tag"].is_null()) {
    if (!j["failure_tag"].is_string()) return fail("failure_tag must be a string");
    d.failure_tag = j["failure_tag"].get<std::string>();
  }
  return d;
}

std::string rfc3339_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string_view to_string(StepStatus s) {
  switch (s) {
    case StepStatus::Pending: return "pending";
    case StepStatus::Accepted: return "accepted";
    case StepStatus::Rejected: return "rejected";
  }
  return "pending";
}

StepStatus parse_step_status(std::string_view name) {
  if (name == "pending") return StepStatus::Pending;
  if (name == "accepted") return StepStatus::Accepted;
  if (name == "rejected") return StepStatus::Rejected;
  throw Error(ErrorCode::InvalidArgument, "unknown step status '" + std::string(name) + "'");
}

DecisionLog::DecisionLog(std::filesystem::path path, const std::vector<SampleRecord>& samples)
    : path_(std::move(path)) {
  for (const auto& s : samples) variants_[step_key(s)].insert(s.variant);
  std::error_code ec;
  if (!std::filesystem::exists(path_, ec)) return;
  for (const auto& row : read_jsonl(path_)) {
    const ReviewDecision d = parse_decision(row);
    latest_[decision_key(d.task_id, d.step_id, d.variant)] = d;
  }
}

StepStatus DecisionLog::record(const ReviewDecision& input) {
  ReviewDecision d = input;
  if (d.accepted != all_true(d.criteria)) {
    throw Error(ErrorCode::InvalidArgument, "accepted must equal the conjunction of criteria");
  }
  if (d.timestamp.empty()) d.timestamp = rfc3339_now();
  const std::string key = d.task_id + ":" + d.step_id;

  std::lock_guard lock(mu_);
  const auto it = variants_.find(key);
  if (it == variants_.end() || it->second.count(d.variant) == 0) {
    throw Error(ErrorCode::UnknownSample,
                "no sample " + key + ":" + std::string(to_string(d.variant)));
  }
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  out << json(d).dump() << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "cannot append to " + path_.string());
  latest_[decision_key(d.task_id, d.step_id, d.variant)] = d;
  return status_locked(key);
}

StepStatus DecisionLog::status_locked(const std::string& key) const {
  const auto it = variants_.find(key);
  if (it == variants_.end()) {
    throw Error(ErrorCode::UnknownSample, "no step " + key);
  }
  bool all_accepted = true;
  for (VariantKind v : it->second) {
    const auto d = latest_.find(key + ":" + std::string(to_string(v)));
    if (d == latest_.end()) {
      all_accepted = false;
      continue;
    }
    if (!d->second.accepted) return StepStatus::Rejected;
  }
  return all_accepted ? StepStatus::Accepted : StepStatus::Pending;
}

StepStatus DecisionLog::step_status(const std::string& task_id, const std::string& step_id) const {
  std::lock_guard lock(mu_);
  return status_locked(task_id + ":" + step_id);
}

std::optional<ReviewDecision> DecisionLog::latest(const std::string& task_id,
                                                  const std::string& step_id,
                                                  VariantKind variant) const {
  std::lock_guard lock(mu_);
  const auto it = latest_.find(decision_key(task_id, step_id, variant));
  if (it == latest_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> DecisionLog::steps() const {
  std::vector<std::string> out;
  for (const auto& [key, _] : variants_) out.push_back(key);
  return out;
}

bool DecisionLog::has_step(const std::string& task_id, const std::string& step_id) const {
  return variants_.count(task_id + ":" + step_id) != 0;
}

}  // namespace gp::dataset
