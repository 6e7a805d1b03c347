#include "gp/instruction/instruction.hpp"

#include <algorithm>
#include <cmath>

#include "gp/core/error.hpp"
#include "gp/core/io.hpp"

namespace gp::instr {

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::Above: return "above";
    case Direction::Below: return "below";
    case Direction::Left: return "left";
    case Direction::Right: return "right";
  }
  return "above";
}

Direction parse_direction(std::string_view name) {
  for (Direction d : {Direction::Above, Direction::Below, Direction::Left, Direction::Right}) {
    if (to_string(d) == name) return d;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown direction '" + std::string(name) + "'");
}

Direction opposite(Direction d) {
  switch (d) {
    case Direction::Above: return Direction::Below;
    case Direction::Below: return Direction::Above;
    case Direction::Left: return Direction::Right;
    case Direction::Right: return Direction::Left;
  }
  return d;
}

std::string_view phrase(Direction d) {
  switch (d) {
    case Direction::Above: return "above";
    case Direction::Below: return "below";
    case Direction::Left: return "to the left of";
    case Direction::Right: return "to the right of";
  }
  return "";
}

std::string_view to_string(ActionKind a) {
  switch (a) {
    case ActionKind::Click: return "click";
    case ActionKind::Type: return "type";
    case ActionKind::Select: return "select";
  }
  return "click";
}

ActionKind parse_action(std::string_view name) {
  const std::string lower = lowercase(name);
  if (lower == "click") return ActionKind::Click;
  if (lower == "type") return ActionKind::Type;
  if (lower == "select") return ActionKind::Select;
  throw Error(ErrorCode::InvalidArgument, "unknown action '" + std::string(name) + "'");
}

Direction spatial_direction(const Bbox& anchor, const Bbox& target) {
  const Point a = anchor.center();
  const Point t = target.center();
  const double dx = t.x - a.x;
  const double dy = t.y - a.y;
  if (dx == 0 && dy == 0) throw Error(ErrorCode::CoincidentCenters, "anchor and target share a centre");
  if (std::abs(dx) == std::abs(dy)) {
    throw Error(ErrorCode::NoDominantAxis, "diagonal displacement has no dominant axis");
  }
  if (std::abs(dy) > std::abs(dx)) return dy < 0 ? Direction::Above : Direction::Below;
  return dx < 0 ? Direction::Left : Direction::Right;
}

std::vector<AnchorChoice> rank_anchors(const ElementRecord& target,
                                       const std::vector<ElementRecord>& candidates) {
  std::vector<AnchorChoice> ranked;
  for (const auto& c : candidates) {
    if (c.text.empty()) continue;
    if (!target.node_ref.empty() && c.node_ref == target.node_ref) continue;
    const double distance = center_distance(c.bbox, target.bbox);
    if (!(distance > 0)) continue;
    Direction d;
    try {
      d = spatial_direction(c.bbox, target.bbox);
    } catch (const Error&) {
      continue;
    }
    ranked.push_back({c, d, distance});
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const AnchorChoice& a, const AnchorChoice& b) {
    if (std::abs(a.distance - b.distance) > 1e-9) return a.distance < b.distance;
    const Point ca = a.anchor.bbox.center();
    const Point cb = b.anchor.bbox.center();
    if (ca.y != cb.y) return ca.y < cb.y;
    return ca.x < cb.x;
  });
  return ranked;
}

AnchorChoice find_relational_anchor(const ElementRecord& target,
                                    const std::vector<ElementRecord>& candidates) {
  auto ranked = rank_anchors(target, candidates);
  if (ranked.empty()) {
    throw Error(ErrorCode::NoAnchorAvailable,
                "no candidate with visible text and a dominant direction");
  }
  return std::move(ranked.front());
}

std::string element_type_label(const ElementRecord& e) {
  if (!e.role.empty()) return lowercase(e.role);
  const std::string tag = lowercase(e.tag);
  if (tag == "a") return "link";
  if (tag == "button") return "button";
  if (tag == "select") return "combobox";
  if (tag == "textarea") return "textbox";
  if (tag == "input") {
    const std::string type = lowercase(e.input_type);
    if (type == "submit" || type == "button" || type == "reset" || type == "image") return "button";
    if (type == "search") return "searchbox";
    if (type == "checkbox" || type == "radio") return type;
    return "textbox";
  }
  return tag;
}

TemplateSet TemplateSet::load(const std::filesystem::path& dir) {
  TemplateSet set;
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw Error(ErrorCode::MissingTemplate, "template directory not found: " + dir.string());
  }
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".tmpl") continue;
    set.add(entry.path().stem().string(), std::string(trim(read_file(entry.path()))));
  }
  return set;
}

void TemplateSet::add(std::string key, std::string text) { templates_[std::move(key)] = std::move(text); }

const std::string& TemplateSet::get(ActionKind action, std::string_view form) const {
  const std::string key = std::string(to_string(action)) + "_" + std::string(form);
  const auto it = templates_.find(key);
  if (it == templates_.end()) throw Error(ErrorCode::MissingTemplate, "no template " + key + ".tmpl");
  return it->second;
}

std::string fill_template(std::string_view tmpl, const std::map<std::string, std::string>& slots) {
  std::string out;
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      const std::size_t close = tmpl.find('}', i);
      if (close != std::string_view::npos) {
        const std::string name(tmpl.substr(i + 1, close - i - 1));
        const auto it = slots.find(name);
        if (it == slots.end()) {
          throw Error(ErrorCode::MissingTemplate, "template slot {" + name + "} has no value");
        }
        out += it->second;
        i = close + 1;
        continue;
      }
    }
    out.push_back(tmpl[i++]);
  }
  return out;
}

InstructionPair generate_instructions(ActionKind action, const ElementRecord& target,
                                      const std::optional<AnchorChoice>& anchor,
                                      const TemplateSet& templates, std::string_view value) {
  const std::string type = element_type_label(target);
  if (target.text.empty() && type.empty()) {
    throw Error(ErrorCode::InvalidArgument, "target has neither text nor a type label");
  }
  InstructionPair pair;
  pair.action = action;
  std::map<std::string, std::string> slots = {
      {"text", target.text}, {"type", type}, {"value", std::string(value)}};
  pair.direct = fill_template(templates.get(action, target.text.empty() ? "direct_untitled" : "direct"),
                              slots);
  if (anchor) {
    slots["anchor"] = anchor->anchor.text;
    slots["direction"] = std::string(phrase(anchor->direction));
    pair.relational = fill_template(templates.get(action, "relational"), slots);
    pair.anchor_text = anchor->anchor.text;
    pair.direction = anchor->direction;
  }
  return pair;
}

bool in_direction_band(const Bbox& anchor, Direction d, const Bbox& element) {
  const Point a = anchor.center();
  const Point e = element.center();
  switch (d) {
    case Direction::Above:
    case Direction::Below: {
      const double half = 0.75 * anchor.w;
      if (e.x < a.x - half || e.x > a.x + half) return false;
      return d == Direction::Above ? e.y < a.y : e.y > a.y;
    }
    case Direction::Left:
    case Direction::Right: {
      const double half = 0.75 * anchor.h;
      if (e.y < a.y - half || e.y > a.y + half) return false;
      return d == Direction::Left ? e.x < a.x : e.x > a.x;
    }
  }
  return false;
}

AmbiguityCheck check_unambiguous(const InstructionPair& instruction, InstructionType form,
                                 const std::vector<ElementRecord>& elements,
                                 const ElementRecord& target) {
  AmbiguityCheck check;
  const std::string type = element_type_label(target);

  if (form == InstructionType::Direct) {
    for (const auto& e : elements) {
      if (e.text == target.text && element_type_label(e) == type) check.conflicts.push_back(e);
    }
    check.unambiguous = check.conflicts.size() == 1;
    return check;
  }

  if (!instruction.relational || !instruction.anchor_text || !instruction.direction) return check;

  std::vector<ElementRecord> anchors;
  for (const auto& e : elements) {
    if (e.text == *instruction.anchor_text && e.node_ref != target.node_ref) anchors.push_back(e);
  }
  if (anchors.size() != 1) {
    check.conflicts = std::move(anchors);
    return check;
  }
  const ElementRecord& anchor = anchors.front();
  bool target_in_band = false;
  for (const auto& e : elements) {
    if (e.node_ref == anchor.node_ref && !e.node_ref.empty()) continue;
    if (element_type_label(e) != type) continue;
    if (!in_direction_band(anchor.bbox, *instruction.direction, e.bbox)) continue;
    check.conflicts.push_back(e);
    if (e.node_ref == target.node_ref && e.bbox == target.bbox) target_in_band = true;
  }
  check.unambiguous = target_in_band && check.conflicts.size() == 1;
  return check;
}

}  // namespace gp::instr
