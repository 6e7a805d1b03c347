#include "gp/dataset/split.hpp"

#include <algorithm>

#include "gp/core/error.hpp"
#include "gp/core/random.hpp"

namespace gp::dataset {

using nlohmann::json;

SplitSpec SplitSpec::preset(const std::string& name, std::size_t target_size) {
  SplitSpec s;
  s.name = name;
  s.target_size = target_size;
  if (name == "style") {
    s.composition = {{VariantKind::Style, 1}};
  } else if (name == "text_shrink_precision") {
    s.composition = {{VariantKind::TextShrink, 1}, {VariantKind::Precision, 1}};
  } else if (name == "all") {
    s.composition = {{VariantKind::Style, 1}, {VariantKind::TextShrink, 1}, {VariantKind::Precision, 1}};
  } else if (name == "all_25k") {
    s.composition = {{VariantKind::Original, 1},
                     {VariantKind::Style, 5},
                     {VariantKind::TextShrink, 1},
                     {VariantKind::Precision, 1}};
    s.allow_partial = true;
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown split preset '" + name + "'");
  }
  return s;
}

void to_json(json& j, const SplitSpec& s) {
  json composition = json::object();
  for (const auto& [kind, copies] : s.composition) composition[std::string(to_string(kind))] = copies;
  j = json{{"name", s.name},
           {"composition", composition},
           {"target_size", s.target_size},
           {"allow_partial", s.allow_partial}};
}

void from_json(const json& j, SplitSpec& s) {
  s.name = j.at("name").get<std::string>();
  s.composition.clear();
  for (const auto& [kind, copies] : j.at("composition").items()) {
    const int n = copies.get<int>();
    if (n < 0) throw Error(ErrorCode::InvalidArgument, "negative copies for " + kind);
    s.composition[parse_variant_kind(kind)] = n;
  }
  s.target_size = j.at("target_size").get<std::size_t>();
  s.allow_partial = j.value("allow_partial", false);
}

void to_json(json& j, const SplitManifest& m) {
  j = json{{"name", m.name}, {"seed", m.seed}, {"steps", m.steps}, {"size", m.sample_ids.size()},
           {"sample_ids", m.sample_ids}};
}

SplitManifest build_split(const std::vector<SampleRecord>& pool, const SplitSpec& spec,
                          std::uint64_t seed) {
  // step -> variant -> records ordered by copy index
  std::map<std::string, std::map<VariantKind, std::vector<const SampleRecord*>>> by_step;
  for (const auto& s : pool) by_step[step_key(s)][s.variant].push_back(&s);
  for (auto& [_, variants] : by_step) {
    for (auto& [__, records] : variants) {
      std::sort(records.begin(), records.end(), [](const SampleRecord* a, const SampleRecord* b) {
        return a->applied_spec.copy < b->applied_spec.copy;
      });
    }
  }

  std::vector<std::string> steps;
  for (const auto& [key, variants] : by_step) {
    if (!spec.allow_partial) {
      for (const auto& [kind, copies] : spec.composition) {
        const auto it = variants.find(kind);
        const std::size_t have = it == variants.end() ? 0 : it->second.size();
        if (have < static_cast<std::size_t>(copies)) {
          throw Error(ErrorCode::InsufficientPool,
                      "step " + key + " has " + std::to_string(have) + " " +
                          std::string(to_string(kind)) + " samples, split '" + spec.name +
                          "' needs " + std::to_string(copies));
        }
      }
    }
    steps.push_back(key);
  }

  Rng rng(seed);
  rng.shuffle(std::span(steps));

  SplitManifest manifest;
  manifest.name = spec.name;
  manifest.seed = seed;
  for (const auto& key : steps) {
    std::vector<std::string> picked;
    const auto& variants = by_step.at(key);
    for (const auto& [kind, copies] : spec.composition) {
      const auto it = variants.find(kind);
      if (it == variants.end()) continue;
      const std::size_t n = std::min<std::size_t>(copies, it->second.size());
      for (std::size_t i = 0; i < n; ++i) picked.push_back(sample_id(*it->second[i]));
    }
    if (picked.empty()) continue;
    if (manifest.sample_ids.size() + picked.size() > spec.target_size) break;
    manifest.sample_ids.insert(manifest.sample_ids.end(), picked.begin(), picked.end());
    ++manifest.steps;
  }
  return manifest;
}

}  // namespace gp::dataset
