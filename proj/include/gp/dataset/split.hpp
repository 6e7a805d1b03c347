#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gp/dataset/sample.hpp"

namespace gp::dataset {

struct SplitSpec {
  std::string name;
  std::map<VariantKind, int> composition;  // copies per step
  std::size_t target_size = 0;
  /// Steps whose pool lacks some required samples (e.g. removed by teacher
  /// filtering) contribute what they have instead of failing the split.
  bool allow_partial = false;

  /// Table-style presets: "style", "text_shrink_precision", "all", "all_25k".
  static SplitSpec preset(const std::string& name, std::size_t target_size);
};

void to_json(nlohmann::json& j, const SplitSpec& s);
void from_json(const nlohmann::json& j, SplitSpec& s);

struct SplitManifest {
  std::string name;
  std::uint64_t seed = 0;
  std::vector<std::string> sample_ids;
  std::size_t steps = 0;
};

void to_json(nlohmann::json& j, const SplitManifest& m);

/// Chooses whole steps in seeded random order until the next step would
/// exceed target_size. Per step, the requested number of samples of each
/// variant are drawn (style copies in copy order). Throws InsufficientPool
/// naming the first step that cannot supply the composition, unless
/// allow_partial is set.
SplitManifest build_split(const std::vector<SampleRecord>& pool, const SplitSpec& spec,
                          std::uint64_t seed);

}  // namespace gp::dataset
