#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "gp/core/geometry.hpp"
#include "gp/core/variant_kind.hpp"
#include "gp/harness/resize.hpp"

namespace gp::harness {

enum class ModelFamily { UiTars, Gta1, Qwen };

std::string_view to_string(ModelFamily f);
/// Throws UnknownFamily.
ModelFamily parse_family(std::string_view name);

struct EvalConfig {
  VariantKind variant = VariantKind::Original;
  InstructionType instruction_type = InstructionType::Direct;
  bool reasoning = false;
  ModelFamily family = ModelFamily::UiTars;
  std::string endpoint;
  std::string model_name;

  /// "<variant>-<direct|relational>-<reasoning|noreasoning>"
  std::string cell() const;
  /// Hash over every field that changes predictions; used to decide whether
  /// an existing predictions file can be resumed.
  std::string hash() const;
};

void to_json(nlohmann::json& j, const EvalConfig& c);
void from_json(const nlohmann::json& j, EvalConfig& c);

/// Parses a cell name produced by EvalConfig::cell().
void parse_cell(std::string_view cell, EvalConfig& c);

/// Prompt text files: <family>_<reasoning|noreasoning>.txt plus
/// qwen_system.txt. Slots: {instruction} {height} {width}.
class PromptSet {
 public:
  static PromptSet load(const std::filesystem::path& dir);
  void add(std::string name, std::string text) { texts_[std::move(name)] = std::move(text); }
  /// Throws MissingTemplate.
  const std::string& get(const std::string& name) const;

 private:
  std::map<std::string, std::string> texts_;
};

/// Builds the OpenAI-style message list for one request. `png` must already
/// be resized to plan.w x plan.h.
nlohmann::json render_prompt(const EvalConfig& config, const PromptSet& prompts,
                             const std::string& instruction, const ResizePlan& plan,
                             std::string_view png);

struct ParsedPoint {
  Point point;
  /// More than one action was present; the first was used.
  bool multiple_actions = false;
};

/// Extracts the predicted click point (resized-image pixels) from a raw model
/// response. Throws ParseFailed.
ParsedPoint parse_prediction(ModelFamily family, std::string_view raw);

/// Formats a point the way each family answers; used by the mock server and
/// the parser round-trip tests.
std::string format_response(ModelFamily family, Point p, bool reasoning,
                            std::string_view thought = "I will click the element.");

}  // namespace gp::harness
