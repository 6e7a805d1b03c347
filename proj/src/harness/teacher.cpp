#include "gp/harness/teacher.hpp"

#include "gp/browser/session.hpp"
#include "gp/core/error.hpp"
#include "gp/core/io.hpp"
#include "gp/core/log.hpp"
#include "gp/harness/runner.hpp"

namespace gp::harness {

std::string_view to_string(TeacherVerdict v) {
  switch (v) {
    case TeacherVerdict::Keep: return "keep";
    case TeacherVerdict::Reject: return "reject";
    case TeacherVerdict::Unfiltered: return "unfiltered";
  }
  return "unfiltered";
}

void to_json(nlohmann::json& j, const TeacherResult& r) {
  j = {{"sample_id", r.sample_id},
       {"verdict", to_string(r.verdict)},
       {"point", r.point ? nlohmann::json(*r.point) : nlohmann::json(nullptr)},
       {"note", r.note}};
}

TeacherResult teacher_filter(const dataset::Dataset& dataset, const dataset::SampleRecord& sample,
                             ChatBackend& teacher, const PromptSet& prompts, const TeacherConfig& config) {
  TeacherResult result;
  result.sample_id = dataset::sample_id(sample);
  const bool relational = config.instruction_type == InstructionType::Relational;
  if (relational && !sample.instruction_relational) {
    result.note = "no relational instruction";
    return result;
  }

  EvalConfig eval;
  eval.variant = sample.variant;
  eval.instruction_type = config.instruction_type;
  eval.reasoning = config.reasoning;
  eval.family = config.family;
  eval.model_name = config.model_name;

  const std::string png = read_file(dataset.screenshot_path(sample));
  const Size dims = browser::png_dimensions(png);
  const ResizePlan plan = smart_resize(dims.height, dims.width);
  PredictionRecord record;
  record.bbox = sample.bbox;
  try {
    const auto messages = render_prompt(eval, prompts,
                                        relational ? *sample.instruction_relational : sample.instruction_direct,
                                        plan, resize_png(png, plan));
    record.raw_response =
        complete_with_retry(teacher, messages, config.model_name, config.attempts, config.backoff_ms);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::EndpointUnreachable && e.code() != ErrorCode::RequestFailed) throw;
    const Error unavailable(ErrorCode::TeacherUnavailable, e.what());
    log::warn(result.sample_id + ": " + unavailable.what());
    result.note = std::string(to_string(unavailable.code())) + ": " + unavailable.what();
    return result;
  }

  score_response(record, config.family, plan, /*map_back=*/true);
  result.point = record.point_original;
  if (record.scored_hit()) {
    result.verdict = TeacherVerdict::Keep;
  } else {
    result.verdict = TeacherVerdict::Reject;
    result.note = record.parse_error.value_or("teacher point outside bbox");
  }
  return result;
}

}  // namespace gp::harness
