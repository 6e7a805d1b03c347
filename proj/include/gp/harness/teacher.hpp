#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "gp/dataset/sample.hpp"
#include "gp/harness/client.hpp"
#include "gp/harness/model.hpp"

namespace gp::harness {

/// Rejection sampling with a strong grounding model: a training sample is
/// kept when the teacher can locate its target.
enum class TeacherVerdict { Keep, Reject, Unfiltered };

std::string_view to_string(TeacherVerdict v);

struct TeacherConfig {
  ModelFamily family = ModelFamily::UiTars;
  std::string model_name;
  bool reasoning = false;
  /// Instruction shown to the teacher; direct by default.
  InstructionType instruction_type = InstructionType::Direct;
  int attempts = 3;
  int backoff_ms = 500;
};

struct TeacherResult {
  std::string sample_id;
  TeacherVerdict verdict = TeacherVerdict::Unfiltered;
  std::optional<Point> point;  // screenshot pixels
  std::string note;
};

void to_json(nlohmann::json& j, const TeacherResult& r);

/// Keep iff the teacher's point falls inside the sample bbox. An unreachable
/// teacher yields Unfiltered (the sample is neither kept nor rejected); an
/// unparsable answer counts as a miss.
TeacherResult teacher_filter(const dataset::Dataset& dataset, const dataset::SampleRecord& sample,
                             ChatBackend& teacher, const PromptSet& prompts, const TeacherConfig& config);

}  // namespace gp::harness
