#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gp/core/variant_kind.hpp"
#include "gp/stats/stats.hpp"

namespace gp::stats {

/// Outcomes of one model on one configuration cell. Series ids are pair keys
/// (task:step), so the same id appears in every variant's series.
struct CellInput {
  std::string model;
  VariantKind variant = VariantKind::Original;
  InstructionType instruction_type = InstructionType::Direct;
  bool reasoning = false;
  OutcomeSeries outcomes;
  std::vector<PointAndBox> points;  // records with a parsed point
  std::size_t parse_failures = 0;
  std::size_t skipped = 0;
};

struct CellSummary {
  VariantKind variant = VariantKind::Original;
  InstructionType instruction_type = InstructionType::Direct;
  bool reasoning = false;
  std::size_t n = 0;
  std::size_t hits = 0;
  RateCI bootstrap;
  RateCI clopper_pearson;
  std::optional<DistanceMetrics> distance;
  std::size_t parse_failures = 0;
  std::size_t skipped = 0;
};

/// Paired comparison of one perturbed cell against its original cell.
struct ConfigComparison {
  InstructionType instruction_type = InstructionType::Direct;
  bool reasoning = false;
  RobustnessRow row;
  std::size_t dropped = 0;  // ids present in only one of the two series
};

struct PerturbationRow {
  VariantKind variant = VariantKind::Style;
  /// Pooled over reasoning modes; absent when no cell of that type exists.
  std::optional<RobustnessRow> direct;
  std::optional<RobustnessRow> relational;
  std::size_t b = 0;  // summed over the configurations
  std::size_t c = 0;
  int significant = 0;  // configurations with p < 0.05
  int configurations = 0;
  std::vector<ConfigComparison> configs;
};

struct ModelReport {
  std::string model;
  /// Equal-weight mean of the original cells' hit rates.
  double base_accuracy = 0;
  std::vector<CellSummary> cells;
  std::vector<PerturbationRow> rows;  // kPerturbations order, present ones only
  /// Direct vs relational on original screenshots, pooled over reasoning
  /// modes; absent when either side is missing or the proportion degenerates.
  std::optional<ZTest> direct_vs_relational;
};

struct RobustnessReport {
  std::uint64_t seed = kDefaultSeed;
  int resamples = kDefaultResamples;
  VariantKind baseline = VariantKind::Original;
  std::vector<ModelReport> models;  // sorted by model name
};

nlohmann::json to_json_value(const RobustnessReport& report);

inline constexpr double kSignificance = 0.05;

/// Throws MissingBaseline when a model has a perturbed cell without the
/// baseline cell of the same instruction type and reasoning mode, or no
/// baseline cell at all.
RobustnessReport build_report(const std::vector<CellInput>& cells, VariantKind baseline = VariantKind::Original,
                              std::uint64_t seed = kDefaultSeed, int resamples = kDefaultResamples);

}  // namespace gp::stats
