#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gp/core/variant_kind.hpp"
#include "gp/dataset/sample.hpp"

namespace gp::dataset {

/// Review checklist, in display order.
inline constexpr std::array<std::string_view, 5> kReviewCriteria = {
    "The target element bounding box is correct.",
    "The bounding box is centered on the target element.",
    "The ground truth element text and surrounding context are realistic.",
    "The UI is not extremely unrealistic (slightly occluded elements are acceptable).",
    "The instruction is unambiguous for the target element (text matches, element type "
    "matches, no duplicate targets).",
};

struct ReviewDecision {
  std::string task_id;
  std::string step_id;
  VariantKind variant = VariantKind::Original;
  std::array<bool, 5> criteria{};
  bool accepted = false;
  std::string reviewer;
  std::string timestamp;  // RFC 3339
  std::optional<std::string> failure_tag;
};

void to_json(nlohmann::json& j, const ReviewDecision& d);

/// Strict parse: all five criteria must be booleans and `accepted` must be
/// their conjunction. Throws Error{InvalidArgument}.
ReviewDecision parse_decision(const nlohmann::json& j);

/// Current UTC time as RFC 3339 with seconds.
std::string rfc3339_now();

enum class StepStatus { Pending, Accepted, Rejected };

std::string_view to_string(StepStatus s);
StepStatus parse_step_status(std::string_view name);

/// Append-only decision log over a dataset. The latest decision per
/// (task, step, variant) wins; step status is derived: rejected if any
/// variant's latest decision rejects it, accepted once every variant of the
/// step has an accepting latest decision, pending otherwise.
class DecisionLog {
 public:
  DecisionLog(std::filesystem::path path, const std::vector<SampleRecord>& samples);

  /// Validates and appends. Throws UnknownSample or InvalidArgument.
  StepStatus record(const ReviewDecision& d);

  StepStatus step_status(const std::string& task_id, const std::string& step_id) const;

  std::optional<ReviewDecision> latest(const std::string& task_id, const std::string& step_id,
                                       VariantKind variant) const;

  /// Step keys ("task:step") in sorted order.
  std::vector<std::string> steps() const;

  bool has_step(const std::string& task_id, const std::string& step_id) const;

 private:
  StepStatus status_locked(const std::string& key) const;

  std::filesystem::path path_;
  std::map<std::string, std::set<VariantKind>> variants_;  // step key -> variants present
  std::map<std::string, ReviewDecision> latest_;            // "task:step:variant"
  mutable std::mutex mu_;
};

}  // namespace gp::dataset
