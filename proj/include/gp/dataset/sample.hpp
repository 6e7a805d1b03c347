#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gp/core/geometry.hpp"
#include "gp/core/variant_kind.hpp"
#include "gp/instruction/instruction.hpp"
#include "gp/perturbation/variant.hpp"

namespace gp::dataset {

/// One Mind2Web-style step from the input JSONL.
struct StepInput {
  std::string task_id;
  std::string step_id;
  std::filesystem::path mhtml_path;
  instr::ActionKind action = instr::ActionKind::Click;
  std::string target_text;
  std::string target_tag;
  Bbox bbox;
  std::string value;  // typed text / selected option, empty for clicks

  std::string key() const { return task_id + ":" + step_id; }
};

void to_json(nlohmann::json& j, const StepInput& s);
void from_json(const nlohmann::json& j, StepInput& s);

/// Reads a step JSONL. Relative mhtml paths resolve against `archive_dir`
/// when given, else against the steps file's directory.
std::vector<StepInput> load_steps(const std::filesystem::path& steps_file,
                                  const std::optional<std::filesystem::path>& archive_dir = {});

struct SampleRecord {
  std::string task_id;
  std::string step_id;
  VariantKind variant = VariantKind::Original;
  std::string screenshot;  // relative to the dataset directory
  Size image_dims;
  Bbox bbox;
  std::string instruction_direct;
  std::optional<std::string> instruction_relational;
  std::optional<std::string> anchor_text;
  std::optional<std::string> direction;
  instr::ActionKind action = instr::ActionKind::Click;
  perturb::AppliedSpec applied_spec;
  Size viewport;

  friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

void to_json(nlohmann::json& j, const SampleRecord& s);
void from_json(const nlohmann::json& j, SampleRecord& s);

/// "<task>:<step>" identifies a matched pair across variants.
std::string step_key(const SampleRecord& s);

/// "<task>:<step>:<variant>", with "#<copy>" appended for extra copies of
/// the same variant (training splits with several style seeds).
std::string sample_id(const SampleRecord& s);

/// Writes records sorted by sample id so output is independent of worker
/// scheduling.
void write_samples(const std::filesystem::path& path, std::vector<SampleRecord> samples);

std::vector<SampleRecord> read_samples(const std::filesystem::path& path);

/// Sample records plus the directory their screenshot paths are relative to.
struct Dataset {
  std::filesystem::path dir;
  std::vector<SampleRecord> samples;

  static Dataset load(const std::filesystem::path& dir);

  const SampleRecord* find(const std::string& id) const;
  std::filesystem::path screenshot_path(const SampleRecord& s) const { return dir / s.screenshot; }
};

/// Stores PNG bytes under <dataset>/shots/<sha256>.png (no-op when the file
/// already exists) and returns the relative path.
std::string store_screenshot(const std::filesystem::path& dataset_dir, std::string_view png);

}  // namespace gp::dataset
