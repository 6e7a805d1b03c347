#include "gp/harness/model.hpp"

#include <regex>

#include "gp/core/error.hpp"
#include "gp/core/io.hpp"
#include "gp/core/log.hpp"

namespace gp::harness {

using nlohmann::json;

std::string_view to_string(ModelFamily f) {
  switch (f) {
    case ModelFamily::UiTars: return "uitars";
    case ModelFamily::Gta1: return "gta1";
    case ModelFamily::Qwen: return "qwen";
  }
  return "uitars";
}

ModelFamily parse_family(std::string_view name) {
  const std::string lower = lowercase(name);
  if (lower == "uitars" || lower == "ui-tars") return ModelFamily::UiTars;
  if (lower == "gta1" || lower == "gta-1") return ModelFamily::Gta1;
  if (lower == "qwen" || lower == "qwen2.5-vl") return ModelFamily::Qwen;
  throw Error(ErrorCode::UnknownFamily, "unknown model family '" + std::string(name) + "'");
}

std::string EvalConfig::cell() const {
  return std::string(to_string(variant)) + "-" + std::string(to_string(instruction_type)) + "-" +
         (reasoning ? "reasoning" : "noreasoning");
}

std::string EvalConfig::hash() const {
  const json key = {{"variant", to_string(variant)},
                    {"instruction_type", to_string(instruction_type)},
                    {"reasoning", reasoning},
                    {"family", to_string(family)},
                    {"model_name", model_name}};
  return sha256_hex(key.dump()).substr(0, 16);
}

void to_json(json& j, const EvalConfig& c) {
  j = json{{"variant", to_string(c.variant)},
           {"instruction_type", to_string(c.instruction_type)},
           {"reasoning", c.reasoning},
           {"model_family", to_string(c.family)},
           {"endpoint", c.endpoint},
           {"model_name", c.model_name}};
}

void from_json(const json& j, EvalConfig& c) {
  c.variant = parse_variant_kind(j.at("variant").get<std::string>());
  c.instruction_type = parse_instruction_type(j.at("instruction_type").get<std::string>());
  c.reasoning = j.at("reasoning").get<bool>();
  c.family = parse_family(j.at("model_family").get<std::string>());
  c.endpoint = j.value("endpoint", "");
  c.model_name = j.value("model_name", "");
}

void parse_cell(std::string_view cell, EvalConfig& c) {
  const auto first = cell.find('-');
  const auto second = cell.find('-', first == std::string_view::npos ? first : first + 1);
  if (first == std::string_view::npos || second == std::string_view::npos) {
    throw Error(ErrorCode::InvalidArgument, "malformed configuration cell '" + std::string(cell) + "'");
  }
  c.variant = parse_variant_kind(cell.substr(0, first));
  c.instruction_type = parse_instruction_type(cell.substr(first + 1, second - first - 1));
  const auto mode = cell.substr(second + 1);
  if (mode != "reasoning" && mode != "noreasoning") {
    throw Error(ErrorCode::InvalidArgument, "malformed configuration cell '" + std::string(cell) + "'");
  }
  c.reasoning = mode == "reasoning";
}

PromptSet PromptSet::load(const std::filesystem::path& dir) {
  PromptSet set;
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw Error(ErrorCode::MissingTemplate, "prompt directory not found: " + dir.string());
  }
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".txt") continue;
    std::string text = read_file(entry.path());
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
    set.add(entry.path().stem().string(), std::move(text));
  }
  return set;
}

const std::string& PromptSet::get(const std::string& name) const {
  const auto it = texts_.find(name);
  if (it == texts_.end()) throw Error(ErrorCode::MissingTemplate, "no prompt " + name + ".txt");
  return it->second;
}

namespace {

// Only the named slots are substituted; other braces (the qwen tool schema
// is JSON) pass through.
std::string substitute(std::string text, const std::map<std::string, std::string>& slots) {
  for (const auto& [name, value] : slots) {
    const std::string token = "{" + name + "}";
    for (std::size_t at = text.find(token); at != std::string::npos;
         at = text.find(token, at + value.size())) {
      text.replace(at, token.size(), value);
    }
  }
  return text;
}

json image_part(std::string_view png) {
  return {{"type", "image_url"},
          {"image_url", {{"url", "data:image/png;base64," + base64_encode(png)}}}};
}

json text_part(const std::string& text) { return {{"type", "text"}, {"text", text}}; }

}  // namespace

json render_prompt(const EvalConfig& config, const PromptSet& prompts, const std::string& instruction,
                   const ResizePlan& plan, std::string_view png) {
  const std::map<std::string, std::string> slots = {{"instruction", instruction},
                                                    {"height", std::to_string(plan.h)},
                                                    {"width", std::to_string(plan.w)}};
  const std::string mode = config.reasoning ? "reasoning" : "noreasoning";
  switch (config.family) {
    case ModelFamily::UiTars:
      return json::array(
          {{{"role", "system"}, {"content", "You are a helpful assistant."}},
           {{"role", "user"},
            {"content", json::array({text_part(substitute(prompts.get("uitars_" + mode), slots)),
                                     image_part(png)})}}});
    case ModelFamily::Gta1:
      return json::array(
          {{{"role", "system"}, {"content", substitute(prompts.get("gta1_" + mode), slots)}},
           {{"role", "user"}, {"content", json::array({image_part(png), text_part(instruction)})}}});
    case ModelFamily::Qwen: {
      std::string system = substitute(prompts.get("qwen_system"), slots);
      if (config.reasoning) system = prompts.get("qwen_reasoning_prefix") + "\n\n" + system;
      return json::array(
          {{{"role", "system"}, {"content", system}},
           {{"role", "user"}, {"content", json::array({image_part(png), text_part(instruction)})}}});
    }
  }
  throw Error(ErrorCode::UnknownFamily, "unknown model family");
}

namespace {

constexpr const char* kNum = R"((-?\d+(?:\.\d+)?))";

std::string_view after_action(std::string_view raw, bool last) {
  const auto at = last ? raw.rfind("Action:") : raw.find("Action:");
  return at == std::string_view::npos ? raw : raw.substr(at + 7);
}

[[noreturn]] void parse_failed(ModelFamily family, std::string_view raw) {
  std::string preview(raw.substr(0, 200));
  throw Error(ErrorCode::ParseFailed,
              "no " + std::string(to_string(family)) + " action in response: " + preview);
}

ParsedPoint parse_uitars(std::string_view raw) {
  static const std::regex re(std::string(R"((?:click|left_double|right_single)\s*\(\s*start_box\s*=\s*['"]?\s*(?:<\|box_start\|>)?\s*\(\s*)") +
                             kNum + R"(\s*,\s*)" + kNum +
                             R"(\s*\)\s*(?:<\|box_end\|>)?\s*['"]?\s*\))");
  const std::string region(after_action(raw, false));
  auto it = std::sregex_iterator(region.begin(), region.end(), re);
  if (it == std::sregex_iterator()) parse_failed(ModelFamily::UiTars, raw);
  ParsedPoint out{{std::stod((*it)[1]), std::stod((*it)[2])}, false};
  out.multiple_actions = std::next(it) != std::sregex_iterator();
  return out;
}

ParsedPoint parse_gta1(std::string_view raw) {
  static const std::regex re(std::string(R"(\(\s*)") + kNum + R"(\s*,\s*)" + kNum + R"(\s*\))");
  const std::string region(after_action(raw, true));
  std::smatch last;
  bool found = false;
  for (auto it = std::sregex_iterator(region.begin(), region.end(), re); it != std::sregex_iterator();
       ++it) {
    last = *it;
    found = true;
  }
  if (!found) parse_failed(ModelFamily::Gta1, raw);
  return {{std::stod(last[1]), std::stod(last[2])}, false};
}

ParsedPoint parse_qwen(std::string_view raw) {
  static const std::regex coordinate(std::string(R"("coordinate"\s*:\s*\[\s*)") + kNum +
                                     R"(\s*,\s*)" + kNum + R"(\s*\])");
  constexpr std::string_view kOpen = "<tool_call>";
  constexpr std::string_view kClose = "</tool_call>";
  std::size_t calls = 0;
  std::optional<Point> first;
  for (std::size_t at = raw.find(kOpen); at != std::string_view::npos; at = raw.find(kOpen, at + 1)) {
    const std::size_t body = at + kOpen.size();
    const std::size_t end = raw.find(kClose, body);
    const std::string_view payload =
        raw.substr(body, end == std::string_view::npos ? std::string_view::npos : end - body);
    ++calls;
    if (first) continue;
    try {
      const json call = json::parse(payload);
      const json& args = call.contains("arguments") ? call["arguments"] : call;
      const json& c = args.at("coordinate");
      first = Point{c.at(0).get<double>(), c.at(1).get<double>()};
    } catch (const json::exception&) {
      // fall through to the lenient scan below
    }
  }
  if (first) return {*first, calls > 1};
  const std::string text(raw);
  std::smatch m;
  if (std::regex_search(text, m, coordinate)) return {{std::stod(m[1]), std::stod(m[2])}, false};
  parse_failed(ModelFamily::Qwen, raw);
}

std::string number(double v) {
  if (v == std::floor(v) && std::abs(v) < 1e15) return std::to_string(static_cast<long long>(v));
  std::string s = std::to_string(v);
  while (!s.empty() && s.back() == '0') s.pop_back();
  return s;
}

}  // namespace

ParsedPoint parse_prediction(ModelFamily family, std::string_view raw) {
  ParsedPoint p;
  switch (family) {
    case ModelFamily::UiTars: p = parse_uitars(raw); break;
    case ModelFamily::Gta1: p = parse_gta1(raw); break;
    case ModelFamily::Qwen: p = parse_qwen(raw); break;
  }
  if (p.multiple_actions) log::warn("response contains several actions; using the first");
  return p;
}

std::string format_response(ModelFamily family, Point p, bool reasoning, std::string_view thought) {
  const std::string x = number(p.x);
  const std::string y = number(p.y);
  const std::string prefix = reasoning ? "Thought: " + std::string(thought) + "\n" : "";
  switch (family) {
    case ModelFamily::UiTars:
      return prefix + "Action: click(start_box='<|box_start|>(" + x + "," + y + ")<|box_end|>')";
    case ModelFamily::Gta1:
      return reasoning ? prefix + "Action: (" + x + "," + y + ")" : "(" + x + "," + y + ")";
    case ModelFamily::Qwen:
      return prefix + "<tool_call>\n{\"name\": \"computer_use\", \"arguments\": {\"action\": \"left_click\", \"coordinate\": [" +
             x + ", " + y + "]}}\n</tool_call>";
  }
  return {};
}

}  // namespace gp::harness
