#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "gp/harness/runner.hpp"
#include "gp/stats/report.hpp"

namespace gp::report {

/// Converts a predictions file into the statistics input: outcomes keyed by
/// pair key, parsed points for the distance metrics, failure counts.
stats::CellInput cell_from_predictions(const harness::PredictionFile& file);

/// "*", "**", "***" for p below 0.05, 0.01, 0.001; empty otherwise.
std::string stars(double p);

enum class TableFormat { Text, Csv, Json };

/// Throws InvalidArgument.
TableFormat parse_table_format(std::string_view name);

/// Robustness table, one row per (model, perturbation): flip rate direct and
/// relational, net delta direct and relational, b/c, significant tests.
/// Output depends only on the report.
std::string render_table(const stats::RobustnessReport& report, TableFormat format);

/// Per-cell hit rates with both intervals, for plotting.
std::string render_hit_rate_csv(const stats::RobustnessReport& report);

/// Per-configuration flip rates and net deltas, for plotting.
std::string render_flip_rate_csv(const stats::RobustnessReport& report);

struct DirectionRow {
  std::string direction;
  std::size_t n = 0;
  std::size_t hits = 0;
  stats::RateCI ci;  // Clopper-Pearson
};

struct DirectionBreakdown {
  std::vector<DirectionRow> rows;  // above, below, left, right; empty groups omitted
  std::vector<std::string> missing;  // directions with no records
  std::size_t total = 0;
};

/// Groups relational records by target direction. Throws NoRelationalRecords
/// when no record is relational.
DirectionBreakdown direction_breakdown(const std::vector<harness::PredictionRecord>& records);

nlohmann::json to_json_value(const DirectionBreakdown& breakdown);
std::string render_direction_csv(const DirectionBreakdown& breakdown);

struct FailureMode {
  std::string_view category;
  std::string_view mode;
  std::string_view description;
};

/// The eight failure modes used for qualitative tagging.
const std::vector<FailureMode>& failure_taxonomy();

struct FailureTag {
  std::string sample_id;
  std::string config;  // cell name of the prediction, e.g. "style-direct-reasoning"
  std::string category;
  std::string mode;
  std::string note;

  friend bool operator==(const FailureTag&, const FailureTag&) = default;
};

void to_json(nlohmann::json& j, const FailureTag& t);
void from_json(const nlohmann::json& j, FailureTag& t);

/// Looks up `mode` (case-insensitive) in the taxonomy, fills the category
/// and appends the tag to `tags_path` unless an identical tag is already
/// stored. Returns false for a duplicate. Throws UnknownMode.
bool tag_failure(const std::filesystem::path& tags_path, FailureTag tag);

std::vector<FailureTag> read_tags(const std::filesystem::path& tags_path);

}  // namespace gp::report
