#include "gp/stats/report.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "gp/core/error.hpp"
#include "gp/core/random.hpp"

namespace gp::stats {

using nlohmann::json;

namespace {

json rate_json(const RateCI& r) { return {{"rate", r.rate}, {"lo", r.lo}, {"hi", r.hi}}; }

json row_json(const RobustnessRow& r) {
  return {{"n", r.n},
          {"b", r.b},
          {"c", r.c},
          {"flip_rate", r.flip_rate},
          {"net_delta_pp", r.net_delta_pp},
          {"delta_ci_pp", {r.delta_ci_lo, r.delta_ci_hi}},
          {"p_value", r.p_value},
          {"test_used", to_string(r.test_used)}};
}

json optional_row(const std::optional<RobustnessRow>& r) { return r ? row_json(*r) : json(nullptr); }

using CellKey = std::tuple<VariantKind, InstructionType, bool>;

// Concatenates the two reasoning modes into one paired sample; ids are
// prefixed so the same step from both modes stays two distinct pairs.
PairedOutcomes pooled(const std::vector<const PairedOutcomes*>& parts, const std::vector<bool>& modes) {
  PairedOutcomes out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const std::string prefix = modes[i] ? "r|" : "n|";
    for (std::size_t k = 0; k < parts[i]->n(); ++k) {
      out.sample_ids.push_back(prefix + parts[i]->sample_ids[k]);
      out.original_hits.push_back(parts[i]->original_hits[k]);
      out.perturbed_hits.push_back(parts[i]->perturbed_hits[k]);
    }
  }
  return out;
}

}  // namespace

RobustnessReport build_report(const std::vector<CellInput>& cells, VariantKind baseline, std::uint64_t seed,
                              int resamples) {
  RobustnessReport report;
  report.seed = seed;
  report.resamples = resamples;
  report.baseline = baseline;

  std::map<std::string, std::map<CellKey, const CellInput*>> by_model;
  for (const auto& cell : cells) {
    const CellKey key{cell.variant, cell.instruction_type, cell.reasoning};
    if (!by_model[cell.model].emplace(key, &cell).second) {
      throw Error(ErrorCode::InvalidArgument, "duplicate cell for model " + cell.model);
    }
  }

  for (const auto& [model, model_cells] : by_model) {
    ModelReport mr;
    mr.model = model;

    double base_sum = 0;
    int base_cells = 0;
    for (const auto& [key, cell] : model_cells) {
      if (cell->outcomes.n() == 0) continue;
      CellSummary s;
      std::tie(s.variant, s.instruction_type, s.reasoning) = key;
      s.n = cell->outcomes.n();
      s.hits = cell->outcomes.hit_count();
      s.bootstrap = hit_rate_ci(cell->outcomes, CIMethod::Bootstrap, resamples, seed);
      s.clopper_pearson = hit_rate_ci(cell->outcomes, CIMethod::ClopperPearson);
      if (!cell->points.empty()) s.distance = distance_metrics(cell->points);
      s.parse_failures = cell->parse_failures;
      s.skipped = cell->skipped;
      if (s.variant == baseline) {
        base_sum += s.bootstrap.rate;
        ++base_cells;
      }
      mr.cells.push_back(s);
    }
    if (base_cells == 0) {
      throw Error(ErrorCode::MissingBaseline, "no " + std::string(to_string(baseline)) +
                                                  " predictions for model " + model);
    }
    mr.base_accuracy = base_sum / base_cells;

    for (const VariantKind variant : kAllVariants) {
      if (variant == baseline) continue;
      PerturbationRow row;
      row.variant = variant;
      std::map<InstructionType, std::vector<PairedOutcomes>> pairs_by_type;
      std::map<InstructionType, std::vector<bool>> modes_by_type;
      for (const InstructionType type : {InstructionType::Direct, InstructionType::Relational}) {
        for (const bool reasoning : {false, true}) {
          const auto it = model_cells.find({variant, type, reasoning});
          if (it == model_cells.end()) continue;
          const auto base = model_cells.find({baseline, type, reasoning});
          if (base == model_cells.end()) {
            throw Error(ErrorCode::MissingBaseline,
                        "model " + model + ": no " + std::string(to_string(baseline)) + "-" +
                            std::string(to_string(type)) + (reasoning ? "-reasoning" : "-noreasoning") +
                            " predictions to pair with " + std::string(to_string(variant)));
          }
          PairedOutcomes pairs = pair_outcomes(base->second->outcomes, it->second->outcomes);
          ConfigComparison cmp;
          cmp.instruction_type = type;
          cmp.reasoning = reasoning;
          cmp.row = paired_stats(pairs, resamples, seed);
          cmp.dropped = pairs.only_in_original.size() + pairs.only_in_perturbed.size();
          row.b += cmp.row.b;
          row.c += cmp.row.c;
          row.significant += cmp.row.p_value < kSignificance ? 1 : 0;
          ++row.configurations;
          row.configs.push_back(cmp);
          pairs_by_type[type].push_back(std::move(pairs));
          modes_by_type[type].push_back(reasoning);
        }
      }
      if (row.configurations == 0) continue;
      for (auto& [type, parts] : pairs_by_type) {
        std::vector<const PairedOutcomes*> ptrs;
        for (const auto& p : parts) ptrs.push_back(&p);
        const RobustnessRow pooled_row = paired_stats(pooled(ptrs, modes_by_type[type]), resamples, seed);
        (type == InstructionType::Direct ? row.direct : row.relational) = pooled_row;
      }
      mr.rows.push_back(std::move(row));
    }
    // Report order: precision, style, text_shrink.
    std::stable_sort(mr.rows.begin(), mr.rows.end(), [](const PerturbationRow& a, const PerturbationRow& b) {
      const auto rank = [](VariantKind v) {
        return std::find(kPerturbations.begin(), kPerturbations.end(), v) - kPerturbations.begin();
      };
      return rank(a.variant) < rank(b.variant);
    });

    std::size_t k[2] = {0, 0};
    std::size_t n[2] = {0, 0};
    for (const auto& [key, cell] : model_cells) {
      if (std::get<0>(key) != baseline) continue;
      const int side = std::get<1>(key) == InstructionType::Direct ? 0 : 1;
      k[side] += cell->outcomes.hit_count();
      n[side] += cell->outcomes.n();
    }
    if (n[0] > 0 && n[1] > 0) {
      try {
        mr.direct_vs_relational = two_proportion_z(k[0], n[0], k[1], n[1]);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateProportion) throw;
      }
    }
    report.models.push_back(std::move(mr));
  }
  return report;
}

json to_json_value(const RobustnessReport& report) {
  json models = json::array();
  for (const auto& m : report.models) {
    json cells = json::array();
    for (const auto& c : m.cells) {
      json dist = nullptr;
      if (c.distance) {
        dist = {{"mse", c.distance->mse}, {"nmse", c.distance->nmse},
                {"d_norm", c.distance->d_norm}, {"count", c.distance->count}};
      }
      cells.push_back({{"variant", to_string(c.variant)},
                       {"instruction_type", to_string(c.instruction_type)},
                       {"reasoning", c.reasoning},
                       {"n", c.n},
                       {"hits", c.hits},
                       {"hit_rate_bootstrap", rate_json(c.bootstrap)},
                       {"hit_rate_clopper_pearson", rate_json(c.clopper_pearson)},
                       {"distance", dist},
                       {"parse_failures", c.parse_failures},
                       {"skipped", c.skipped}});
    }
    json rows = json::array();
    for (const auto& r : m.rows) {
      json configs = json::array();
      for (const auto& cmp : r.configs) {
        configs.push_back({{"instruction_type", to_string(cmp.instruction_type)},
                           {"reasoning", cmp.reasoning},
                           {"dropped", cmp.dropped},
                           {"stats", row_json(cmp.row)}});
      }
      rows.push_back({{"perturbation", to_string(r.variant)},
                      {"direct", optional_row(r.direct)},
                      {"relational", optional_row(r.relational)},
                      {"b", r.b},
                      {"c", r.c},
                      {"significant", r.significant},
                      {"configurations", r.configurations},
                      {"configs", configs}});
    }
    json z = nullptr;
    if (m.direct_vs_relational) z = {{"z", m.direct_vs_relational->z}, {"p_value", m.direct_vs_relational->p_value}};
    models.push_back({{"model", m.model},
                      {"base_accuracy", m.base_accuracy},
                      {"cells", cells},
                      {"perturbations", rows},
                      {"direct_vs_relational", z}});
  }
  return {{"baseline", to_string(report.baseline)},
          {"bootstrap", {{"seed", report.seed}, {"resamples", report.resamples}, {"rng", std::string(Rng::kName)}}},
          {"models", models}};
}

}  // namespace gp::stats
