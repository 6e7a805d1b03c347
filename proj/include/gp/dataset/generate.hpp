#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gp/browser/session.hpp"
#include "gp/core/error.hpp"
#include "gp/dataset/sample.hpp"
#include "gp/instruction/instruction.hpp"
#include "gp/perturbation/theme.hpp"
#include "gp/perturbation/variant.hpp"

namespace gp::dataset {

/// A step that could not produce a sample for one variant. Not fatal to a
/// batch: the generator records it and moves on.
class StepRejected : public Error {
 public:
  StepRejected(std::string stage, ErrorCode cause, const std::string& message);

  const std::string& stage() const { return stage_; }
  ErrorCode cause() const { return cause_; }

 private:
  std::string stage_;
  ErrorCode cause_;
};

struct GenerationContext {
  const perturb::ThemeRegistry* themes = nullptr;
  const instr::TemplateSet* templates = nullptr;
  std::filesystem::path dataset_dir;
};

/// load -> apply_variant -> relocate_bbox -> anchor -> instructions ->
/// screenshot for one (step, variant). Throws StepRejected.
SampleRecord generate_step(const StepInput& step, const perturb::VariantSpec& spec,
                           browser::Session& session, const GenerationContext& ctx);

/// Seed for one (step, variant, copy) derived from the run seed, so a job's
/// result does not depend on which worker ran it or in what order.
std::uint64_t derive_seed(std::uint64_t run_seed, const std::string& step_key, VariantKind kind,
                          int copy);

struct GenerateOptions {
  std::vector<VariantKind> variants{kAllVariants.begin(), kAllVariants.end()};
  int style_copies = 1;
  std::uint64_t seed = 0;
  int workers = 4;
  /// Forces one theme for style variants (empty = seeded sampling).
  std::string theme;
  perturb::VariantSpec defaults;  // scale / font parameters
  browser::SessionConfig session;
};

struct Rejection {
  std::string task_id;
  std::string step_id;
  VariantKind variant = VariantKind::Original;
  int copy = 0;
  std::string stage;
  std::string cause;
  std::string message;
};

struct GenerationReport {
  std::size_t jobs = 0;
  std::size_t accepted = 0;
  std::vector<Rejection> rejections;

  nlohmann::json to_json() const;
};

/// Runs every (step, variant, copy) job on a pool of workers, each with its
/// own browser session, then writes samples.jsonl and generation_report.json
/// under ctx.dataset_dir.
GenerationReport generate_dataset(const std::vector<StepInput>& steps, const GenerateOptions& options,
                                  const GenerationContext& ctx);

}  // namespace gp::dataset
