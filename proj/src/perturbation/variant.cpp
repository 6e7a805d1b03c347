#include "gp/perturbation/variant.hpp"

#include <algorithm>
#include <cmath>

#include "gp/core/error.hpp"

namespace gp::perturb {

using browser::ElementRecord;
using browser::PageHandle;
using nlohmann::json;

namespace {

// Units are the children of a group container that may trade places: either
// an interactable element or a wrapper holding exactly one. Anything that
// contains a form field or label is never a unit.
constexpr std::string_view kDiscoverGroups = R"js(((selectors) => {
  const INTERACTIVE = 'a, button, input, select, textarea, [role=button], [role=link], ' +
                      '[role=tab], [role=menuitem], [onclick]';
  const FORM = 'input, select, textarea, label';
  const visible = (el) => {
    const cs = getComputedStyle(el);
    const r = el.getBoundingClientRect();
    return cs.display !== 'none' && cs.visibility === 'visible' && r.width * r.height >= 1;
  };
  const isUnit = (child) => {
    if (child.matches(FORM) || child.querySelector(FORM)) return false;
    if (child.matches(INTERACTIVE)) return visible(child);
    const inner = child.querySelectorAll(INTERACTIVE);
    return inner.length === 1 && visible(inner[0]);
  };
  const path = (el) => {
    const parts = [];
    while (el && el !== document.documentElement) {
      const parent = el.parentElement;
      const index = Array.prototype.indexOf.call(parent.children, el) + 1;
      parts.unshift(el.tagName.toLowerCase() + ':nth-child(' + index + ')');
      el = parent;
    }
    return ['html'].concat(parts).join(' > ');
  };
  const seen = new Set();
  const groups = [];
  const units = [];
  for (const selector of selectors) {
    for (const container of document.querySelectorAll(selector)) {
      if (seen.has(container)) continue;
      seen.add(container);
      const kids = Array.from(container.children).filter(isUnit);
      if (kids.length >= 2) {
        groups.push(container);
        units.push(kids);
      }
    }
  }
  window.__gpShuffleUnits = units;
  return groups.map((g, i) => ({container: path(g), size: units[i].length}));
}))js";

constexpr std::string_view kApplyShuffle = R"js(((orders) => {
  const units = window.__gpShuffleUnits || [];
  orders.forEach((order, gi) => {
    const group = units[gi];
    const markers = group.map((u) => {
      const marker = document.createComment('gp-slot');
      u.replaceWith(marker);
      return marker;
    });
    markers.forEach((marker, i) => marker.replaceWith(group[order[i]]));
  });
  delete window.__gpShuffleUnits;
  void document.body.offsetHeight;
  return orders.length;
}))js";

constexpr std::string_view kInjectStylesheet = R"js(((css) => {
  const s = document.createElement('style');
  s.id = 'gp-theme';
  s.textContent = css;
  (document.head || document.documentElement).appendChild(s);
  void document.body.offsetHeight;
  return true;
}))js";

constexpr std::string_view kScaleRoot = R"js(((scale) => {
  document.documentElement.style.setProperty('zoom', String(scale));
  void document.body.offsetHeight;
  return true;
}))js";

// Sizes are read for every element before any is written, so inherited sizes
// are not shrunk twice.
constexpr std::string_view kShrinkText = R"js(((factor, floor) => {
  const els = Array.from(document.querySelectorAll('*'));
  const sizes = els.map((e) => parseFloat(getComputedStyle(e).fontSize));
  let changed = 0;
  els.forEach((e, i) => {
    if (!isFinite(sizes[i])) return;
    const next = Math.max(factor * sizes[i], floor);
    e.style.setProperty('font-size', next + 'px', 'important');
    changed++;
  });
  void document.body.offsetHeight;
  const clipping = new Set(['hidden', 'clip', 'scroll', 'auto']);
  let relaxed = 0;
  for (const e of els) {
    const overflows = e.scrollHeight > e.clientHeight + 1 || e.scrollWidth > e.clientWidth + 1;
    if (!overflows || e === document.documentElement || e === document.body) continue;
    const cs = getComputedStyle(e);
    let touched = false;
    if (clipping.has(cs.overflowX) || clipping.has(cs.overflowY)) {
      e.style.setProperty('overflow', 'visible', 'important');
      touched = true;
    }
    const hasText = Array.from(e.childNodes).some(
        (n) => n.nodeType === Node.TEXT_NODE && n.textContent.trim().length > 0);
    if (hasText && e.scrollHeight > e.clientHeight + 1) {
      e.style.setProperty('height', 'auto', 'important');
      e.style.setProperty('max-height', 'none', 'important');
      touched = true;
    }
    if (touched) relaxed++;
  }
  void document.body.offsetHeight;
  return {changed, relaxed};
}))js";

std::string call_with(std::string_view fn, const json& args) {
  std::string out = "(";
  out += fn;
  out += ")(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ", ";
    out += args[i].dump();
  }
  out += ")";
  return out;
}

}  // namespace

void VariantSpec::validate() const {
  if (!(scale > 0 && scale <= 1)) throw Error(ErrorCode::InvalidSpec, "scale must be in (0, 1]");
  if (!(font_scale > 0 && font_scale <= 1)) {
    throw Error(ErrorCode::InvalidSpec, "font_scale must be in (0, 1]");
  }
  if (!(font_floor >= 1)) throw Error(ErrorCode::InvalidSpec, "font_floor must be >= 1 px");
}

AppliedSpec apply_variant(PageHandle& page, const VariantSpec& spec, const ThemeRegistry& themes,
                          Rng& rng) {
  spec.validate();
  AppliedSpec applied;
  applied.kind = spec.kind;
  applied.seed = spec.seed;
  applied.copy = spec.copy;

  switch (spec.kind) {
    case VariantKind::Original:
      break;

    case VariantKind::Style: {
      std::string name = spec.theme;
      if (name.empty()) {
        const auto names = themes.names();
        if (names.empty()) throw Error(ErrorCode::ThemeNotFound, "theme registry is empty");
        name = names[rng.below(names.size())];
      }
      const StyleTheme& theme = themes.get(name);
      applied.theme = theme.name;
      browser::run_script(page, call_with(kInjectStylesheet, json::array({theme.stylesheet})));

      const json groups =
          browser::run_script(page, call_with(kDiscoverGroups, json::array({theme.shuffle_groups})));
      json orders = json::array();
      for (const auto& g : groups) {
        ShuffledGroup shuffled;
        shuffled.container = g.at("container").get<std::string>();
        shuffled.order.resize(g.at("size").get<std::size_t>());
        for (std::size_t i = 0; i < shuffled.order.size(); ++i) shuffled.order[i] = i;
        rng.shuffle(std::span(shuffled.order));
        orders.push_back(shuffled.order);
        applied.groups.push_back(std::move(shuffled));
      }
      browser::run_script(page, call_with(kApplyShuffle, json::array({orders})));
      break;
    }

    case VariantKind::Precision:
      applied.scale = spec.scale;
      browser::run_script(page, call_with(kScaleRoot, json::array({spec.scale})));
      break;

    case VariantKind::TextShrink: {
      applied.font_scale = spec.font_scale;
      applied.font_floor = spec.font_floor;
      const json result = browser::run_script(
          page, call_with(kShrinkText, json::array({spec.font_scale, spec.font_floor})));
      applied.fonts_changed = result.value("changed", 0);
      applied.overflow_relaxed = result.value("relaxed", 0);
      break;
    }
  }
  return applied;
}

Bbox predict_bbox_transform(const Bbox& b, const VariantSpec& spec) {
  if (spec.kind == VariantKind::Precision) return b.scaled(spec.scale);
  return b;
}

double match_score(const ElementRecord& candidate, const TargetDescriptor& target,
                   const Bbox& predicted) {
  const double text = candidate.text == target.text ? 1.0 : 0.0;
  const double tag = candidate.tag == target.tag ? 1.0 : 0.0;
  return 0.6 * text + 0.2 * tag + 0.2 * intersection_over_union(candidate.bbox, predicted);
}

const ElementRecord& match_target(const std::vector<ElementRecord>& elements,
                                  const TargetDescriptor& target, const VariantSpec& spec) {
  if (target.node_ref) {
    const auto it = std::find_if(elements.begin(), elements.end(), [&](const ElementRecord& e) {
      return e.node_ref == *target.node_ref;
    });
    if (it != elements.end() && it->text == target.text) return *it;
  }

  const Bbox predicted = predict_bbox_transform(target.original_bbox, spec);
  const ElementRecord* best = nullptr;
  double best_score = -1;
  int ties = 0;
  for (const auto& e : elements) {
    if (e.text != target.text || e.tag != target.tag) continue;
    const double score = match_score(e, target, predicted);
    if (best == nullptr || score > best_score + 1e-9) {
      best = &e;
      best_score = score;
      ties = 1;
    } else if (std::abs(score - best_score) <= 1e-9) {
      ++ties;
    }
  }
  if (best == nullptr) {
    throw Error(ErrorCode::TargetLost,
                "no visible <" + target.tag + "> with text '" + target.text + "'");
  }
  if (ties > 1) {
    throw Error(ErrorCode::AmbiguousTarget,
                std::to_string(ties) + " candidates tie for '" + target.text + "'");
  }
  return *best;
}

Bbox relocate_bbox(PageHandle& page, const TargetDescriptor& target, const VariantSpec& spec) {
  const auto elements = browser::query_interactables(page);
  return match_target(elements, target, spec).bbox;
}

void to_json(json& j, const VariantSpec& s) {
  j = json{{"kind", to_string(s.kind)}, {"theme", s.theme},         {"scale", s.scale},
           {"font_scale", s.font_scale}, {"font_floor", s.font_floor}, {"seed", s.seed},
           {"copy", s.copy}};
}

void from_json(const json& j, VariantSpec& s) {
  s.kind = parse_variant_kind(j.at("kind").get<std::string>());
  s.theme = j.value("theme", "");
  s.scale = j.value("scale", 0.7);
  s.font_scale = j.value("font_scale", 0.8);
  s.font_floor = j.value("font_floor", 11.0);
  s.seed = j.value("seed", std::uint64_t{0});
  s.copy = j.value("copy", 0);
}

void to_json(json& j, const ShuffledGroup& g) {
  j = json{{"container", g.container}, {"order", g.order}};
}

void from_json(const json& j, ShuffledGroup& g) {
  g.container = j.at("container").get<std::string>();
  g.order = j.at("order").get<std::vector<std::size_t>>();
}

void to_json(json& j, const AppliedSpec& s) {
  j = json{{"kind", to_string(s.kind)},
           {"theme", s.theme},
           {"seed", s.seed},
           {"copy", s.copy},
           {"scale", s.scale},
           {"font_scale", s.font_scale},
           {"font_floor", s.font_floor},
           {"groups", s.groups},
           {"fonts_changed", s.fonts_changed},
           {"overflow_relaxed", s.overflow_relaxed}};
}

void from_json(const json& j, AppliedSpec& s) {
  s.kind = parse_variant_kind(j.at("kind").get<std::string>());
  s.theme = j.value("theme", "");
  s.seed = j.value("seed", std::uint64_t{0});
  s.copy = j.value("copy", 0);
  s.scale = j.value("scale", 1.0);
  s.font_scale = j.value("font_scale", 1.0);
  s.font_floor = j.value("font_floor", 0.0);
  s.groups = j.value("groups", std::vector<ShuffledGroup>{});
  s.fonts_changed = j.value("fonts_changed", 0);
  s.overflow_relaxed = j.value("overflow_relaxed", 0);
}

}  // namespace gp::perturb
