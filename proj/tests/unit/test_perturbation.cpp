#include <algorithm>
#include <map>

#include "gp/core/error.hpp"
#include "gp/core/io.hpp"
#include "gp/perturbation/theme.hpp"
#include "gp/perturbation/variant.hpp"
#include "support/support.hpp"

namespace gp::perturb {
namespace {

using browser::ElementRecord;
using browser::PageHandle;

constexpr const char* kFontPage = R"(<!DOCTYPE html><html><head><style>
  body { margin: 0; font-family: "DejaVu Sans", sans-serif; }
  #big { font-size: 16px; } #small { font-size: 12px; } #tiny { font-size: 9px; }
  #box { position: absolute; left: 100px; top: 200px; width: 50px; height: 20px; padding: 0; border: 0; }
</style></head><body>
  <p id="big">Sixteen pixels</p><p id="small">Twelve pixels</p><p id="tiny">Nine pixels</p>
  <button id="box">Go</button>
</body></html>)";

constexpr const char* kGroupPage = R"(<!DOCTYPE html><html><head><style>
  body { margin: 0; font-family: "DejaVu Sans", sans-serif; }
  .btn-group { position: absolute; left: 40px; top: 40px; display: flex; gap: 10px; }
  .btn-group button { width: 120px; height: 36px; }
</style></head><body>
  <div class="btn-group"><button>One</button><button>Two</button><button>Three</button></div>
</body></html>)";

ThemeRegistry themes() { return ThemeRegistry::load(test::data_dir() / "themes"); }

VariantSpec spec_of(VariantKind kind, std::uint64_t seed = 0) {
  VariantSpec s;
  s.kind = kind;
  s.seed = seed;
  return s;
}

AppliedSpec apply(PageHandle& page, const VariantSpec& spec, const ThemeRegistry& registry) {
  Rng rng(spec.seed);
  return apply_variant(page, spec, registry, rng);
}

double font_px(PageHandle& page, const std::string& id) {
  return browser::run_script(page, "parseFloat(getComputedStyle(document.getElementById('" + id + "')).fontSize)")
      .get<double>();
}

const ElementRecord& by_text(const std::vector<ElementRecord>& elements, const std::string& text) {
  const auto it = std::find_if(elements.begin(), elements.end(), [&](const auto& e) { return e.text == text; });
  if (it == elements.end()) throw std::runtime_error("no element '" + text + "'");
  return *it;
}

TEST(VariantSpec, ValidateRejectsOutOfRange) {
  VariantSpec s;
  s.validate();
  for (double bad : {0.0, -0.5, 1.5}) {
    s = VariantSpec{};
    s.scale = bad;
    EXPECT_THROW(s.validate(), Error);
    s = VariantSpec{};
    s.font_scale = bad;
    EXPECT_THROW(s.validate(), Error);
  }
  s = VariantSpec{};
  s.font_floor = 0.5;
  EXPECT_THROW(s.validate(), Error);
}

TEST(PredictBboxTransform, Examples) {
  const VariantSpec precision = spec_of(VariantKind::Precision);
  EXPECT_EQ(predict_bbox_transform({100, 200, 50, 20}, precision), (Bbox{70, 140, 35, 14}));
  EXPECT_EQ(predict_bbox_transform({0, 0, 10, 10}, precision), (Bbox{0, 0, 7, 7}));
  for (VariantKind k : {VariantKind::Original, VariantKind::Style, VariantKind::TextShrink}) {
    EXPECT_EQ(predict_bbox_transform({3, 4, 5, 6}, spec_of(k)), (Bbox{3, 4, 5, 6}));
  }
}

TEST(ThemeRegistry, BundledThemes) {
  const ThemeRegistry registry = themes();
  EXPECT_GE(registry.size(), 4u);
  for (const char* name : {"neobrutalism", "glassmorphism", "dark-flat", "high-contrast"}) {
    ASSERT_TRUE(registry.contains(name)) << name;
    EXPECT_FALSE(registry.get(name).stylesheet.empty());
    EXPECT_FALSE(registry.get(name).shuffle_groups.empty());
  }
  const auto names = registry.names();
  EXPECT_TRUE(std::is_sorted(names.begin(), names.end()));
  try {
    registry.get("vaporwave");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ThemeNotFound);
  }
}

TEST(ThemeRegistry, StylesheetsNeverHideElements) {
  const ThemeRegistry registry = themes();
  for (const auto& name : registry.names()) {
    const std::string css = lowercase(registry.get(name).stylesheet);
    std::string compact;
    std::remove_copy_if(css.begin(), css.end(), std::back_inserter(compact), [](char c) { return c == ' '; });
    EXPECT_EQ(compact.find("display:none"), std::string::npos) << name;
  }
}

TEST(MatchTarget, NodeRefWinsWhenTextMatches) {
  std::vector<ElementRecord> elements = {
      {"button", "", "", "Save", {0, 0, 10, 10}, true, "1"},
      {"button", "", "", "Save", {100, 100, 10, 10}, true, "2"},
  };
  TargetDescriptor t{{0, 0, 10, 10}, "button", "Save", std::string("2")};
  EXPECT_EQ(match_target(elements, t, spec_of(VariantKind::Original)).node_ref, "2");
}

TEST(MatchTarget, IouBreaksTextTies) {
  std::vector<ElementRecord> elements = {
      {"button", "", "", "Save", {0, 0, 10, 10}, true, "1"},
      {"button", "", "", "Save", {70, 140, 35, 14}, true, "2"},
  };
  TargetDescriptor t{{100, 200, 50, 20}, "button", "Save", std::nullopt};
  EXPECT_EQ(match_target(elements, t, spec_of(VariantKind::Precision)).node_ref, "2");
}

TEST(MatchTarget, LostAndAmbiguous) {
  std::vector<ElementRecord> elements = {
      {"button", "", "", "Save", {0, 0, 10, 10}, true, "1"},
      {"button", "", "", "Save", {0, 0, 10, 10}, true, "2"},
  };
  TargetDescriptor missing{{0, 0, 10, 10}, "button", "Delete", std::nullopt};
  try {
    match_target(elements, missing, spec_of(VariantKind::Original));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TargetLost);
  }
  TargetDescriptor twin{{0, 0, 10, 10}, "button", "Save", std::nullopt};
  try {
    match_target(elements, twin, spec_of(VariantKind::Original));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AmbiguousTarget);
  }
}

TEST(MatchScore, Weights) {
  const ElementRecord e{"button", "", "", "Save", {0, 0, 10, 10}, true, "1"};
  EXPECT_DOUBLE_EQ(match_score(e, {{0, 0, 10, 10}, "button", "Save", std::nullopt}, {0, 0, 10, 10}), 1.0);
  EXPECT_DOUBLE_EQ(match_score(e, {{0, 0, 10, 10}, "a", "Save", std::nullopt}, {50, 50, 10, 10}), 0.6);
  EXPECT_DOUBLE_EQ(match_score(e, {{0, 0, 10, 10}, "button", "Other", std::nullopt}, {50, 50, 10, 10}), 0.2);
}

class LivePerturbation : public ::testing::Test {
 protected:
  void SetUp() override { GP_REQUIRE_BROWSER(); }
  PageHandle load(const std::string& html) {
    return browser::load_archive(test::shared_session(),
                                 test::write_html_archive(dir_.path(), "page" + std::to_string(n_++) + ".mhtml", html));
  }
  test::TempDir dir_;
  ThemeRegistry registry_ = themes();
  int n_ = 0;
};

TEST_F(LivePerturbation, TextShrinkAppliesFactorAndFloor) {
  PageHandle page = load(kFontPage);
  const AppliedSpec applied = apply(page, spec_of(VariantKind::TextShrink), registry_);
  EXPECT_GT(applied.fonts_changed, 0);
  EXPECT_NEAR(font_px(page, "big"), 12.8, 0.01);
  EXPECT_NEAR(font_px(page, "small"), 11.0, 0.01);
  EXPECT_NEAR(font_px(page, "tiny"), 11.0, 0.01);
}

TEST_F(LivePerturbation, OriginalIsPixelIdentical) {
  PageHandle page = browser::load_archive(test::shared_session(), test::pages_dir() / "login.mhtml");
  const std::string before = browser::capture_screenshot(page).png;
  const AppliedSpec applied = apply(page, spec_of(VariantKind::Original), registry_);
  EXPECT_EQ(applied.kind, VariantKind::Original);
  EXPECT_EQ(browser::capture_screenshot(page).png, before);
}

TEST_F(LivePerturbation, StyleIsSeedDeterministic) {
  AppliedSpec first;
  Bbox first_box;
  for (int run = 0; run < 2; ++run) {
    PageHandle page = browser::load_archive(test::shared_session(), test::pages_dir() / "shop.mhtml");
    const auto before = browser::query_interactables(page);
    const ElementRecord& target = by_text(before, "Books");
    const VariantSpec spec = spec_of(VariantKind::Style, 42);
    const AppliedSpec applied = apply(page, spec, registry_);
    const Bbox box = relocate_bbox(page, {target.bbox, target.tag, target.text, target.node_ref}, spec);
    EXPECT_FALSE(applied.theme.empty());
    if (run == 0) {
      first = applied;
      first_box = box;
    } else {
      EXPECT_EQ(applied, first);
      EXPECT_EQ(box, first_box);
    }
  }
}

TEST_F(LivePerturbation, PrecisionRelocatesToScaledBox) {
  PageHandle page = load(kFontPage);
  const auto before = browser::query_interactables(page);
  const ElementRecord& target = by_text(before, "Go");
  EXPECT_TRUE(approx_equal(target.bbox, {100, 200, 50, 20}, 0.5));
  const VariantSpec spec = spec_of(VariantKind::Precision);
  apply(page, spec, registry_);
  const Bbox moved = relocate_bbox(page, {target.bbox, target.tag, target.text, std::nullopt}, spec);
  EXPECT_TRUE(approx_equal(moved, {70, 140, 35, 14}, 2.0));
}

TEST_F(LivePerturbation, OriginalRelocatesToSameBox) {
  PageHandle page = browser::load_archive(test::shared_session(), test::pages_dir() / "settings.mhtml");
  const auto before = browser::query_interactables(page);
  const VariantSpec spec = spec_of(VariantKind::Original);
  apply(page, spec, registry_);
  for (const auto& e : before) {
    const Bbox b = relocate_bbox(page, {e.bbox, e.tag, e.text, e.node_ref}, spec);
    EXPECT_TRUE(approx_equal(b, e.bbox, 1.0)) << e.text;
  }
}

TEST_F(LivePerturbation, StyleShuffleMovesTargetToItsDomRect) {
  // Find a seed whose shuffle moves "One" out of the first slot.
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    PageHandle page = load(kGroupPage);
    const auto before = browser::query_interactables(page);
    const ElementRecord& target = by_text(before, "One");
    VariantSpec spec = spec_of(VariantKind::Style, seed);
    spec.theme = "dark-flat";
    const AppliedSpec applied = apply(page, spec, registry_);
    ASSERT_EQ(applied.groups.size(), 1u);
    if (applied.groups[0].order[0] == 0) continue;
    const Bbox moved = relocate_bbox(page, {target.bbox, target.tag, target.text, std::nullopt}, spec);
    EXPECT_NE(moved.x, target.bbox.x);
    EXPECT_GT(moved.area(), 0);
    const Bbox dom = browser::run_script(page,
                                         "(() => { const b = Array.from(document.querySelectorAll('button'))"
                                         ".find((e) => e.textContent === 'One').getBoundingClientRect();"
                                         " return {x: b.x, y: b.y, w: b.width, h: b.height}; })()")
                         .get<Bbox>();
    EXPECT_TRUE(approx_equal(moved, dom, 0.5));
    return;
  }
  FAIL() << "no seed moved the target";
}

TEST_F(LivePerturbation, PrecisionScalesEveryFixtureElement) {
  for (const char* name : {"login.mhtml", "shop.mhtml", "settings.mhtml", "hostile.mhtml"}) {
    SCOPED_TRACE(name);
    PageHandle page = browser::load_archive(test::shared_session(), test::pages_dir() / name);
    const auto before = browser::query_interactables(page);
    apply(page, spec_of(VariantKind::Precision), registry_);
    const auto after = browser::query_interactables(page);
    std::map<std::string, Bbox> moved;
    for (const auto& e : after) moved[e.node_ref] = e.bbox;
    for (const auto& e : before) {
      ASSERT_TRUE(moved.count(e.node_ref)) << e.text;
      EXPECT_TRUE(approx_equal(moved[e.node_ref], e.bbox.scaled(0.7), 2.0)) << e.text;
    }
  }
}

TEST_F(LivePerturbation, TextShrinkFloorHoldsOnFixtures) {
  constexpr const char* kSizes =
      "Array.from(document.querySelectorAll('*')).map((e) => parseFloat(getComputedStyle(e).fontSize))";
  for (const char* name : {"login.mhtml", "shop.mhtml", "settings.mhtml"}) {
    SCOPED_TRACE(name);
    PageHandle page = browser::load_archive(test::shared_session(), test::pages_dir() / name);
    const auto before = browser::run_script(page, kSizes).get<std::vector<double>>();
    apply(page, spec_of(VariantKind::TextShrink), registry_);
    const auto after = browser::run_script(page, kSizes).get<std::vector<double>>();
    ASSERT_EQ(before.size(), after.size());
    for (std::size_t i = 0; i < before.size(); ++i) {
      EXPECT_GE(after[i], 11.0 - 1e-6);
      if (before[i] >= 13.75) EXPECT_NEAR(after[i], 0.8 * before[i], 0.1);
    }
  }
}

TEST_F(LivePerturbation, StylePreservesElementMultiset) {
  for (const char* name : {"login.mhtml", "shop.mhtml", "settings.mhtml"}) {
    for (const auto& theme : registry_.names()) {
      SCOPED_TRACE(std::string(name) + " " + theme);
      PageHandle page = browser::load_archive(test::shared_session(), test::pages_dir() / name);
      const auto key = [](const std::vector<ElementRecord>& v) {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& e : v) out.emplace_back(e.tag, e.text);
        std::sort(out.begin(), out.end());
        return out;
      };
      const auto before = key(browser::query_interactables(page));
      VariantSpec spec = spec_of(VariantKind::Style, 7);
      spec.theme = theme;
      apply(page, spec, registry_);
      EXPECT_EQ(key(browser::query_interactables(page)), before);
    }
  }
}

TEST_F(LivePerturbation, UnknownThemeIsThemeNotFound) {
  PageHandle page = load(kGroupPage);
  VariantSpec spec = spec_of(VariantKind::Style);
  spec.theme = "vaporwave";
  try {
    apply(page, spec, registry_);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ThemeNotFound);
  }
}

}  // namespace
}  // namespace gp::perturb
