#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gp/browser/session.hpp"
#include "gp/core/geometry.hpp"
#include "gp/core/random.hpp"
#include "gp/core/variant_kind.hpp"
#include "gp/perturbation/theme.hpp"

namespace gp::perturb {

struct VariantSpec {
  VariantKind kind = VariantKind::Original;
  /// Style only. Empty means "sample from the registry with the seeded rng".
  std::string theme;
  double scale = 0.7;        // precision
  double font_scale = 0.8;   // text_shrink
  double font_floor = 11.0;  // text_shrink, px
  std::uint64_t seed = 0;
  /// Index among several samples of the same variant for one step.
  int copy = 0;

  /// Throws Error{InvalidSpec} when a parameter is out of range.
  void validate() const;
};

struct ShuffledGroup {
  std::string container;          // CSS path of the parent element
  std::vector<std::size_t> order; // new position i holds old child order[i]
  friend bool operator==(const ShuffledGroup&, const ShuffledGroup&) = default;
};

/// What apply_variant actually did; serialized into every sample.
struct AppliedSpec {
  VariantKind kind = VariantKind::Original;
  std::string theme;
  std::uint64_t seed = 0;
  int copy = 0;
  double scale = 1.0;
  double font_scale = 1.0;
  double font_floor = 0.0;
  std::vector<ShuffledGroup> groups;
  int fonts_changed = 0;
  int overflow_relaxed = 0;

  friend bool operator==(const AppliedSpec&, const AppliedSpec&) = default;
};

void to_json(nlohmann::json& j, const VariantSpec& s);
void from_json(const nlohmann::json& j, VariantSpec& s);
void to_json(nlohmann::json& j, const ShuffledGroup& g);
void from_json(const nlohmann::json& j, ShuffledGroup& g);
void to_json(nlohmann::json& j, const AppliedSpec& s);
void from_json(const nlohmann::json& j, AppliedSpec& s);

/// Applies the perturbation to a loaded page. `rng` drives theme sampling and
/// sibling shuffles; callers seed it from spec.seed. Throws ThemeNotFound or
/// propagates ScriptError.
AppliedSpec apply_variant(browser::PageHandle& page, const VariantSpec& spec,
                          const ThemeRegistry& themes, Rng& rng);

struct TargetDescriptor {
  Bbox original_bbox;
  std::string tag;
  std::string text;
  std::optional<std::string> node_ref;
};

/// Analytic prior for where the target moves: precision scales all four
/// fields; other kinds are the identity.
Bbox predict_bbox_transform(const Bbox& b, const VariantSpec& spec);

/// 0.6 * text equality + 0.2 * tag equality + 0.2 * IoU with the predicted
/// box.
double match_score(const browser::ElementRecord& candidate, const TargetDescriptor& target,
                   const Bbox& predicted);

/// Picks the element that is the target after perturbation. node_ref wins
/// when it resolves to an element with the target's text; otherwise the best
/// scoring candidate with equal text and tag. Throws TargetLost or
/// AmbiguousTarget.
const browser::ElementRecord& match_target(const std::vector<browser::ElementRecord>& elements,
                                           const TargetDescriptor& target,
                                           const VariantSpec& spec);

/// Reads the live page and returns the target's post-perturbation bbox.
Bbox relocate_bbox(browser::PageHandle& page, const TargetDescriptor& target,
                   const VariantSpec& spec);

}  // namespace gp::perturb
