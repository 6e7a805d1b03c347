#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gp/core/geometry.hpp"
#include "gp/dataset/sample.hpp"
#include "gp/harness/client.hpp"
#include "gp/harness/model.hpp"

namespace gp::harness {

/// One model answer for one sample. Besides the raw answer, the record
/// carries the sample fields analysis needs (pair key, bbox, direction) so a
/// predictions file can be analysed without the dataset.
struct PredictionRecord {
  std::string sample_id;
  std::string step_key;
  VariantKind variant = VariantKind::Original;
  InstructionType instruction_type = InstructionType::Direct;
  std::string instruction;
  Bbox bbox;  // ground truth, original screenshot pixels
  std::optional<std::string> direction;
  std::string raw_response;
  std::optional<Point> point;           // resized-image pixels
  std::optional<Point> point_original;  // screenshot pixels
  std::optional<bool> hit;
  std::optional<std::string> parse_error;
  double latency_ms = 0;

  /// Parse failures and failed requests count as misses.
  bool scored_hit() const { return hit.value_or(false); }
};

void to_json(nlohmann::json& j, const PredictionRecord& r);
void from_json(const nlohmann::json& j, PredictionRecord& r);

/// First line of every predictions file.
struct PredictionHeader {
  EvalConfig config;
  std::string config_hash;
  bool map_back = true;
  std::size_t total = 0;    // samples evaluated for this cell
  std::size_t skipped = 0;  // samples lacking the requested instruction type
  std::vector<std::string> skipped_ids;
};

void to_json(nlohmann::json& j, const PredictionHeader& h);
void from_json(const nlohmann::json& j, PredictionHeader& h);

struct PredictionFile {
  PredictionHeader header;
  std::vector<PredictionRecord> records;

  static PredictionFile load(const std::filesystem::path& path);
};

/// "predictions_<model>_<cell>.jsonl" with the model name made path-safe.
std::string predictions_filename(const std::string& model_name, const std::string& cell);

struct RunOptions {
  std::filesystem::path out_dir;
  int parallelism = 8;
  int attempts = 3;
  int backoff_ms = 500;  // doubled after each failed attempt
  /// Map predicted points from the resized frame back to screenshot pixels
  /// before hit testing. When false the point is used as-is.
  bool map_back = true;
  bool resume = true;
};

struct RunResult {
  std::filesystem::path path;
  std::vector<PredictionRecord> records;  // sorted by sample id
  std::size_t skipped = 0;
  std::size_t resumed = 0;  // records reused from an earlier run
};

/// Scores one answer: parses, maps back, hit-tests. Never throws for model
/// output problems; they are recorded in parse_error.
void score_response(PredictionRecord& record, ModelFamily family, const ResizePlan& plan, bool map_back);

/// Evaluates every sample of config.variant (extra style copies excluded).
/// Records are appended to the predictions file as they complete and the
/// file is rewritten sorted at the end. Transport failures that survive the
/// retries abort the run with EndpointUnreachable, leaving the partial file
/// in place for a later resume.
RunResult run_configuration(const dataset::Dataset& dataset, const EvalConfig& config,
                            ChatBackend& backend, const PromptSet& prompts, const RunOptions& options);

/// Sends one request with retry and exponential backoff on transport errors.
std::string complete_with_retry(ChatBackend& backend, const nlohmann::json& messages,
                                const std::string& model, int attempts, int backoff_ms);

}  // namespace gp::harness
