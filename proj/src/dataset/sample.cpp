#include "gp/dataset/sample.hpp"

#include <algorithm>

#include "gp/core/error.hpp"
#include "gp/core/io.hpp"

namespace gp::dataset {

using nlohmann::json;

void to_json(json& j, const StepInput& s) {
  j = json{{"task_id", s.task_id},
           {"step_id", s.step_id},
           {"mhtml_path", s.mhtml_path.string()},
           {"action", instr::to_string(s.action)},
           {"target_text", s.target_text},
           {"target_tag", s.target_tag},
           {"bbox", s.bbox}};
  if (!s.value.empty()) j["value"] = s.value;
}

void from_json(const json& j, StepInput& s) {
  s.task_id = j.at("task_id").get<std::string>();
  s.step_id = j.at("step_id").get<std::string>();
  s.mhtml_path = j.at("mhtml_path").get<std::string>();
  s.action = instr::parse_action(j.at("action").get<std::string>());
  s.target_text = j.at("target_text").get<std::string>();
  s.target_tag = lowercase(j.at("target_tag").get<std::string>());
  s.bbox = j.at("bbox").get<Bbox>();
  s.value = j.value("value", "");
}

std::vector<StepInput> load_steps(const std::filesystem::path& steps_file,
                                  const std::optional<std::filesystem::path>& archive_dir) {
  const auto base = archive_dir ? *archive_dir : steps_file.parent_path();
  std::vector<StepInput> steps;
  for (const auto& j : read_jsonl(steps_file)) {
    StepInput s;
    try {
      s = j.get<StepInput>();
    } catch (const json::exception& e) {
      throw Error(ErrorCode::InvalidArgument,
                  "bad step record in " + steps_file.string() + ": " + e.what());
    }
    if (s.mhtml_path.is_relative()) s.mhtml_path = base / s.mhtml_path;
    steps.push_back(std::move(s));
  }
  return steps;
}

void to_json(json& j, const SampleRecord& s) {
  j = json{{"task_id", s.task_id},
           {"step_id", s.step_id},
           {"variant", to_string(s.variant)},
           {"screenshot", s.screenshot},
           {"image_dims", s.image_dims},
           {"bbox", s.bbox},
           {"instruction_direct", s.instruction_direct},
           {"instruction_relational", s.instruction_relational ? json(*s.instruction_relational) : json()},
           {"anchor_text", s.anchor_text ? json(*s.anchor_text) : json()},
           {"direction", s.direction ? json(*s.direction) : json()},
           {"action", instr::to_string(s.action)},
           {"applied_spec", s.applied_spec},
           {"viewport", s.viewport}};
}

namespace {

std::optional<std::string> optional_string(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<std::string>();
}

}  // namespace

void from_json(const json& j, SampleRecord& s) {
  s.task_id = j.at("task_id").get<std::string>();
  s.step_id = j.at("step_id").get<std::string>();
  s.variant = parse_variant_kind(j.at("variant").get<std::string>());
  s.screenshot = j.at("screenshot").get<std::string>();
  s.image_dims = j.at("image_dims").get<Size>();
  s.bbox = j.at("bbox").get<Bbox>();
  s.instruction_direct = j.at("instruction_direct").get<std::string>();
  s.instruction_relational = optional_string(j, "instruction_relational");
  s.anchor_text = optional_string(j, "anchor_text");
  s.direction = optional_string(j, "direction");
  s.action = instr::parse_action(j.at("action").get<std::string>());
  s.applied_spec = j.at("applied_spec").get<perturb::AppliedSpec>();
  s.viewport = j.at("viewport").get<Size>();
}

std::string step_key(const SampleRecord& s) { return s.task_id + ":" + s.step_id; }

std::string sample_id(const SampleRecord& s) {
  std::string id = step_key(s) + ":" + std::string(to_string(s.variant));
  if (s.applied_spec.copy > 0) id += "#" + std::to_string(s.applied_spec.copy);
  return id;
}

void write_samples(const std::filesystem::path& path, std::vector<SampleRecord> samples) {
  std::sort(samples.begin(), samples.end(), [](const SampleRecord& a, const SampleRecord& b) {
    return sample_id(a) < sample_id(b);
  });
  std::string out;
  for (const auto& s : samples) {
    out += json(s).dump();
    out += '\n';
  }
  write_file_atomic(path, out);
}

std::vector<SampleRecord> read_samples(const std::filesystem::path& path) {
  std::vector<SampleRecord> samples;
  for (const auto& j : read_jsonl(path)) {
    try {
      samples.push_back(j.get<SampleRecord>());
    } catch (const json::exception& e) {
      throw Error(ErrorCode::InvalidArgument, "bad sample record in " + path.string() + ": " + e.what());
    }
  }
  return samples;
}

Dataset Dataset::load(const std::filesystem::path& dir) {
  Dataset d;
  d.dir = dir;
  d.samples = read_samples(dir / "samples.jsonl");
  return d;
}

const SampleRecord* Dataset::find(const std::string& id) const {
  for (const auto& s : samples) {
    if (sample_id(s) == id) return &s;
  }
  return nullptr;
}

std::string store_screenshot(const std::filesystem::path& dataset_dir, std::string_view png) {
  const std::string rel = "shots/" + sha256_hex(png) + ".png";
  const auto path = dataset_dir / rel;
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) {
    std::filesystem::create_directories(path.parent_path());
    write_file_atomic(path, png);
  }
  return rel;
}

}  // namespace gp::dataset
