#include "gp/report/report.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include "gp/core/error.hpp"
#include "gp/core/io.hpp"

namespace gp::report {

using nlohmann::json;

stats::CellInput cell_from_predictions(const harness::PredictionFile& file) {
  const harness::EvalConfig& config = file.header.config;
  stats::CellInput cell;
  cell.model = config.model_name.empty() ? std::string(harness::to_string(config.family)) : config.model_name;
  cell.variant = config.variant;
  cell.instruction_type = config.instruction_type;
  cell.reasoning = config.reasoning;
  cell.skipped = file.header.skipped;
  for (const auto& r : file.records) {
    cell.outcomes.sample_ids.push_back(r.step_key);
    cell.outcomes.hits.push_back(r.scored_hit());
    if (r.point_original) {
      cell.points.push_back({*r.point_original, r.bbox});
    } else {
      ++cell.parse_failures;
    }
  }
  return cell;
}

std::string stars(double p) {
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "";
}

TableFormat parse_table_format(std::string_view name) {
  if (name == "text") return TableFormat::Text;
  if (name == "csv") return TableFormat::Csv;
  if (name == "json") return TableFormat::Json;
  throw Error(ErrorCode::InvalidArgument, "unknown table format '" + std::string(name) + "'");
}

namespace {

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string pct(double fraction) { return fmt("%.1f", 100 * fraction); }

std::string flip_cell(const std::optional<stats::RobustnessRow>& r) {
  return r ? pct(r->flip_rate) : "-";
}

std::string delta_cell(const std::optional<stats::RobustnessRow>& r) {
  return r ? fmt("%+.1f", r->net_delta_pp) + stars(r->p_value) : "-";
}

std::string csv_number(const std::optional<stats::RobustnessRow>& r, double stats::RobustnessRow::*field) {
  return r ? fmt("%.6g", (*r).*field) : "";
}

constexpr std::array<const char*, 9> kColumns = {"Model",     "Base Acc.",  "Perturbation", "Flip Dir.", "Flip Rel.",
                                                 "Net Δ Dir.", "Net Δ Rel.", "b/c",          "Sig."};

std::size_t display_width(const std::string& s) {
  // Count code points, not bytes, so "Δ" aligns.
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char ch) {
    return (static_cast<unsigned char>(ch) & 0xC0) != 0x80;
  }));
}

std::string text_table(const stats::RobustnessReport& report) {
  std::vector<std::array<std::string, 9>> rows;
  rows.push_back({});
  for (std::size_t i = 0; i < kColumns.size(); ++i) rows[0][i] = kColumns[i];
  for (const auto& m : report.models) {
    bool first = true;
    for (const auto& r : m.rows) {
      rows.push_back({first ? m.model : "", first ? pct(m.base_accuracy) : "", std::string(to_string(r.variant)),
                      flip_cell(r.direct), flip_cell(r.relational), delta_cell(r.direct), delta_cell(r.relational),
                      std::to_string(r.b) + "/" + std::to_string(r.c),
                      std::to_string(r.significant) + "/" + std::to_string(r.configurations)});
      first = false;
    }
  }
  std::array<std::size_t, 9> width{};
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], display_width(row[i]));
  }
  std::string out;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    std::string line;
    for (std::size_t i = 0; i < rows[k].size(); ++i) {
      const std::string& cell = rows[k][i];
      const std::string pad(width[i] - display_width(cell), ' ');
      // Text columns left-aligned, numbers right-aligned.
      line += (i == 0 || i == 2) ? cell + pad : pad + cell;
      if (i + 1 < rows[k].size()) line += "  ";
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
    if (k == 0) {
      std::size_t total = 0;
      for (const auto w : width) total += w;
      out += std::string(total + 2 * (width.size() - 1), '-') + "\n";
    }
  }
  out += "Net Δ in percentage points (original - perturbed); * p<0.05, ** p<0.01, *** p<0.001 (McNemar).\n";
  return out;
}

std::string csv_table(const stats::RobustnessReport& report) {
  std::string out =
      "model,base_acc,perturbation,flip_dir,flip_rel,delta_dir_pp,delta_rel_pp,delta_dir_ci_lo,delta_dir_ci_hi,"
      "delta_rel_ci_lo,delta_rel_ci_hi,p_dir,p_rel,b,c,sig,configs\n";
  using R = stats::RobustnessRow;
  for (const auto& m : report.models) {
    for (const auto& r : m.rows) {
      out += m.model + "," + fmt("%.6g", m.base_accuracy) + "," + std::string(to_string(r.variant)) + "," +
             csv_number(r.direct, &R::flip_rate) + "," + csv_number(r.relational, &R::flip_rate) + "," +
             csv_number(r.direct, &R::net_delta_pp) + "," + csv_number(r.relational, &R::net_delta_pp) + "," +
             csv_number(r.direct, &R::delta_ci_lo) + "," + csv_number(r.direct, &R::delta_ci_hi) + "," +
             csv_number(r.relational, &R::delta_ci_lo) + "," + csv_number(r.relational, &R::delta_ci_hi) + "," +
             csv_number(r.direct, &R::p_value) + "," + csv_number(r.relational, &R::p_value) + "," +
             std::to_string(r.b) + "," + std::to_string(r.c) + "," + std::to_string(r.significant) + "," +
             std::to_string(r.configurations) + "\n";
    }
  }
  return out;
}

std::string json_table(const stats::RobustnessReport& report) {
  json rows = json::array();
  for (const auto& m : report.models) {
    for (const auto& r : m.rows) {
      const auto side = [](const std::optional<stats::RobustnessRow>& x) {
        if (!x) return json(nullptr);
        return json{{"flip_rate", x->flip_rate},
                    {"net_delta_pp", x->net_delta_pp},
                    {"p_value", x->p_value},
                    {"stars", stars(x->p_value)}};
      };
      rows.push_back({{"model", m.model},
                      {"base_accuracy", m.base_accuracy},
                      {"perturbation", to_string(r.variant)},
                      {"direct", side(r.direct)},
                      {"relational", side(r.relational)},
                      {"b", r.b},
                      {"c", r.c},
                      {"significant", r.significant},
                      {"configurations", r.configurations}});
    }
  }
  return rows.dump(2) + "\n";
}

}  // namespace

std::string render_table(const stats::RobustnessReport& report, TableFormat format) {
  switch (format) {
    case TableFormat::Text: return text_table(report);
    case TableFormat::Csv: return csv_table(report);
    case TableFormat::Json: return json_table(report);
  }
  return {};
}

std::string render_hit_rate_csv(const stats::RobustnessReport& report) {
  std::string out = "model,variant,instruction_type,reasoning,n,hits,hit_rate,boot_lo,boot_hi,cp_lo,cp_hi,parse_failures\n";
  for (const auto& m : report.models) {
    for (const auto& c : m.cells) {
      out += m.model + "," + std::string(to_string(c.variant)) + "," + std::string(to_string(c.instruction_type)) + "," +
             (c.reasoning ? "true" : "false") + "," + std::to_string(c.n) + "," + std::to_string(c.hits) + "," +
             fmt("%.6g", c.bootstrap.rate) + "," + fmt("%.6g", c.bootstrap.lo) + "," + fmt("%.6g", c.bootstrap.hi) +
             "," + fmt("%.6g", c.clopper_pearson.lo) + "," + fmt("%.6g", c.clopper_pearson.hi) + "," +
             std::to_string(c.parse_failures) + "\n";
    }
  }
  return out;
}

std::string render_flip_rate_csv(const stats::RobustnessReport& report) {
  std::string out = "model,perturbation,instruction_type,reasoning,n,b,c,flip_rate,net_delta_pp,ci_lo,ci_hi,p_value,test\n";
  for (const auto& m : report.models) {
    for (const auto& r : m.rows) {
      for (const auto& cmp : r.configs) {
        const auto& s = cmp.row;
        out += m.model + "," + std::string(to_string(r.variant)) + "," +
               std::string(to_string(cmp.instruction_type)) + "," + (cmp.reasoning ? "true" : "false") + "," +
               std::to_string(s.n) + "," + std::to_string(s.b) + "," + std::to_string(s.c) + "," +
               fmt("%.6g", s.flip_rate) + "," + fmt("%.6g", s.net_delta_pp) + "," + fmt("%.6g", s.delta_ci_lo) + "," +
               fmt("%.6g", s.delta_ci_hi) + "," + fmt("%.6g", s.p_value) + "," + std::string(to_string(s.test_used)) +
               "\n";
      }
    }
  }
  return out;
}

DirectionBreakdown direction_breakdown(const std::vector<harness::PredictionRecord>& records) {
  static constexpr std::array<std::string_view, 4> kDirections = {"above", "below", "left", "right"};
  std::map<std::string, std::pair<std::size_t, std::size_t>> groups;  // direction -> (n, hits)
  std::size_t relational = 0;
  for (const auto& r : records) {
    if (r.instruction_type != InstructionType::Relational) continue;
    ++relational;
    auto& g = groups[r.direction.value_or("unknown")];
    ++g.first;
    g.second += r.scored_hit() ? 1 : 0;
  }
  if (relational == 0) throw Error(ErrorCode::NoRelationalRecords, "no relational prediction records");
  DirectionBreakdown out;
  out.total = relational;
  const auto add = [&](const std::string& name, std::size_t n, std::size_t hits) {
    out.rows.push_back({name, n, hits, stats::clopper_pearson(hits, n)});
  };
  for (const auto d : kDirections) {
    const auto it = groups.find(std::string(d));
    if (it == groups.end()) {
      out.missing.emplace_back(d);
    } else {
      add(it->first, it->second.first, it->second.second);
      groups.erase(it);
    }
  }
  // Anything else (records written without a direction) stays visible so
  // the counts still sum to the relational total.
  for (const auto& [name, g] : groups) add(name, g.first, g.second);
  return out;
}

json to_json_value(const DirectionBreakdown& b) {
  json rows = json::array();
  for (const auto& r : b.rows) {
    rows.push_back({{"direction", r.direction},
                    {"n", r.n},
                    {"hits", r.hits},
                    {"rate", r.ci.rate},
                    {"cp_lo", r.ci.lo},
                    {"cp_hi", r.ci.hi}});
  }
  return {{"total", b.total}, {"rows", rows}, {"missing", b.missing}};
}

std::string render_direction_csv(const DirectionBreakdown& b) {
  std::string out = "direction,n,hits,rate,cp_lo,cp_hi\n";
  for (const auto& r : b.rows) {
    out += r.direction + "," + std::to_string(r.n) + "," + std::to_string(r.hits) + "," + fmt("%.6g", r.ci.rate) +
           "," + fmt("%.6g", r.ci.lo) + "," + fmt("%.6g", r.ci.hi) + "\n";
  }
  return out;
}

const std::vector<FailureMode>& failure_taxonomy() {
  static const std::vector<FailureMode> modes = {
      {"spatial", "Click Region Error", "Correct element identified, wrong physical area clicked"},
      {"spatial", "Location Hallucination", "Correct element named, fabricated coordinates output"},
      {"spatial", "Spatial Reasoning Error", "Incorrect interpretation of above/below/left/right"},
      {"semantic", "Goal Hallucination", "Model invents intent not present in instruction"},
      {"semantic", "Instruction Misinterpretation", "Related but incorrect element selected"},
      {"semantic", "Text Matching Bias", "Clicks visible text match without proper grounding"},
      {"visual", "Visual Confusion", "Reliance on shape/color/position heuristics"},
      {"reasoning", "Reasoning Drift", "CoT misleads final action prediction"},
  };
  return modes;
}

void to_json(json& j, const FailureTag& t) {
  j = {{"sample_id", t.sample_id}, {"config", t.config}, {"category", t.category}, {"mode", t.mode}, {"note", t.note}};
}

void from_json(const json& j, FailureTag& t) {
  t.sample_id = j.at("sample_id").get<std::string>();
  t.config = j.value("config", "");
  t.category = j.at("category").get<std::string>();
  t.mode = j.at("mode").get<std::string>();
  t.note = j.value("note", "");
}

std::vector<FailureTag> read_tags(const std::filesystem::path& tags_path) {
  std::vector<FailureTag> tags;
  std::error_code ec;
  if (!std::filesystem::exists(tags_path, ec)) return tags;
  for (const auto& j : read_jsonl(tags_path)) tags.push_back(j.get<FailureTag>());
  return tags;
}

bool tag_failure(const std::filesystem::path& tags_path, FailureTag tag) {
  const std::string wanted = lowercase(tag.mode);
  const auto& modes = failure_taxonomy();
  const auto it = std::find_if(modes.begin(), modes.end(),
                               [&](const FailureMode& m) { return lowercase(m.mode) == wanted; });
  if (it == modes.end()) throw Error(ErrorCode::UnknownMode, "unknown failure mode '" + tag.mode + "'");
  if (!tag.category.empty() && lowercase(tag.category) != it->category) {
    throw Error(ErrorCode::UnknownMode, "failure mode '" + std::string(it->mode) + "' belongs to category " +
                                            std::string(it->category) + ", not " + tag.category);
  }
  tag.mode = it->mode;
  tag.category = it->category;

  static std::mutex mu;
  std::lock_guard lock(mu);
  for (const auto& existing : read_tags(tags_path)) {
    if (existing == tag) return false;
  }
  if (tags_path.has_parent_path()) std::filesystem::create_directories(tags_path.parent_path());
  std::ofstream out(tags_path, std::ios::app | std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot append to " + tags_path.string());
  out << json(tag).dump() << "\n";
  return true;
}

}  // namespace gp::report
