#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gp/browser/session.hpp"
#include "gp/core/geometry.hpp"
#include "gp/core/variant_kind.hpp"

namespace gp::instr {

using browser::ElementRecord;

enum class Direction { Above, Below, Left, Right };

std::string_view to_string(Direction d);
Direction parse_direction(std::string_view name);
Direction opposite(Direction d);

/// Phrase used inside relational instructions ("above", "to the left of").
std::string_view phrase(Direction d);

enum class ActionKind { Click, Type, Select };

std::string_view to_string(ActionKind a);
ActionKind parse_action(std::string_view name);

/// Classifies the target's displacement from the anchor by the dominant axis
/// of the centre offset. Throws CoincidentCenters or NoDominantAxis.
Direction spatial_direction(const Bbox& anchor, const Bbox& target);

struct AnchorChoice {
  ElementRecord anchor;
  Direction direction = Direction::Above;
  double distance = 0;  // centre to centre, px
};

/// Every qualifying anchor, nearest first (ties: smaller centre y, then x).
std::vector<AnchorChoice> rank_anchors(const ElementRecord& target,
                                       const std::vector<ElementRecord>& candidates);

/// The nearest qualifying anchor. Throws NoAnchorAvailable.
AnchorChoice find_relational_anchor(const ElementRecord& target,
                                    const std::vector<ElementRecord>& candidates);

/// Element type as it appears in instructions: ARIA role when set, else a
/// role derived from the tag ("link", "button", "textbox", ...).
std::string element_type_label(const ElementRecord& e);

/// Named-slot templates loaded from <dir>/<action>_<form>.tmpl. Slots:
/// {text} {type} {direction} {anchor} {value}.
class TemplateSet {
 public:
  static TemplateSet load(const std::filesystem::path& dir);

  void add(std::string key, std::string text);

  /// Throws MissingTemplate.
  const std::string& get(ActionKind action, std::string_view form) const;

  std::size_t size() const { return templates_.size(); }

 private:
  std::map<std::string, std::string> templates_;
};

std::string fill_template(std::string_view tmpl, const std::map<std::string, std::string>& slots);

struct InstructionPair {
  std::string direct;
  std::optional<std::string> relational;
  ActionKind action = ActionKind::Click;
  std::optional<std::string> anchor_text;
  std::optional<Direction> direction;
};

/// `value` is the typed text or selected option for type/select actions.
InstructionPair generate_instructions(ActionKind action, const ElementRecord& target,
                                      const std::optional<AnchorChoice>& anchor,
                                      const TemplateSet& templates, std::string_view value = {});

struct AmbiguityCheck {
  bool unambiguous = false;
  std::vector<ElementRecord> conflicts;
};

/// True iff the chosen instruction form identifies exactly one element.
/// Direct: exactly one element with the target's (text, type). Relational:
/// the anchor text resolves to one element and exactly one element of the
/// target's type lies in the stated direction inside the anchor's band (the
/// anchor box extended along the direction axis, cross extent widened by
/// 50%), and that element is the target.
AmbiguityCheck check_unambiguous(const InstructionPair& instruction, InstructionType form,
                                 const std::vector<ElementRecord>& elements,
                                 const ElementRecord& target);

/// Band membership by element centre.
bool in_direction_band(const Bbox& anchor, Direction d, const Bbox& element);

}  // namespace gp::instr
