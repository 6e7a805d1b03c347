#include "gp/instruction/instruction.hpp"

#include <cmath>
#include <functional>

#include "gp/core/error.hpp"
#include "gp/core/random.hpp"
#include "support/support.hpp"

namespace gp::instr {
namespace {

// A box of the given size centred on (cx, cy).
Bbox centred(double cx, double cy, double w = 20, double h = 10) { return {cx - w / 2, cy - h / 2, w, h}; }

ElementRecord element(const std::string& text, Bbox box, const std::string& tag = "button",
                      const std::string& ref = "") {
  ElementRecord e;
  e.tag = tag;
  e.text = text;
  e.bbox = box;
  e.node_ref = ref.empty() ? text : ref;
  return e;
}

TemplateSet templates() { return TemplateSet::load(test::data_dir() / "templates"); }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

TEST(SpatialDirection, Examples) {
  EXPECT_EQ(spatial_direction(centred(100, 100), centred(100, 40)), Direction::Above);
  EXPECT_EQ(spatial_direction(centred(100, 100), centred(160, 100)), Direction::Right);
  EXPECT_EQ(spatial_direction(centred(100, 100), centred(150, 160)), Direction::Below);
  EXPECT_EQ(spatial_direction(centred(100, 100), centred(40, 110)), Direction::Left);
}

TEST(SpatialDirection, DegenerateCases) {
  EXPECT_EQ(code_of([] { spatial_direction(centred(100, 100), centred(100, 100, 40, 40)); }),
            ErrorCode::CoincidentCenters);
  EXPECT_EQ(code_of([] { spatial_direction(centred(100, 100), centred(130, 130)); }), ErrorCode::NoDominantAxis);
}

TEST(SpatialDirection, Properties) {
  Rng rng(11);
  const auto coord = [&] { return static_cast<double>(rng.below(2000)) / 2.0; };
  int checked = 0;
  for (int i = 0; i < 10000; ++i) {
    const Bbox a = centred(coord(), coord(), 1 + coord() / 10, 1 + coord() / 10);
    const Bbox b = centred(coord(), coord(), 1 + coord() / 10, 1 + coord() / 10);
    Direction d;
    try {
      d = spatial_direction(a, b);
    } catch (const Error&) {
      continue;
    }
    ++checked;
    ASSERT_EQ(spatial_direction(b, a), opposite(d));
    const double dx = coord() - 500, dy = coord() - 500;
    ASSERT_EQ(spatial_direction(a.translated(dx, dy), b.translated(dx, dy)), d);
    for (double s : {0.7, 0.25, 3.0}) ASSERT_EQ(spatial_direction(a.scaled(s), b.scaled(s)), d);
  }
  EXPECT_GT(checked, 9000);
}

TEST(Direction, NamesAndPhrases) {
  for (Direction d : {Direction::Above, Direction::Below, Direction::Left, Direction::Right}) {
    EXPECT_EQ(parse_direction(to_string(d)), d);
    EXPECT_EQ(opposite(opposite(d)), d);
  }
  EXPECT_EQ(phrase(Direction::Left), "to the left of");
  EXPECT_EQ(phrase(Direction::Above), "above");
}

TEST(FindRelationalAnchor, NearestWins) {
  const ElementRecord target = element("Submit", centred(100, 100));
  const std::vector<ElementRecord> candidates = {element("Email", centred(100, 160)),
                                                 element("Help", centred(300, 100))};
  const AnchorChoice a = find_relational_anchor(target, candidates);
  EXPECT_EQ(a.anchor.text, "Email");
  EXPECT_EQ(a.direction, Direction::Above);
  EXPECT_DOUBLE_EQ(a.distance, 60);
}

TEST(FindRelationalAnchor, EmptyTextDoesNotQualify) {
  const ElementRecord target = element("Submit", centred(100, 100));
  EXPECT_EQ(code_of([&] { find_relational_anchor(target, {element("", centred(100, 160), "a", "icon")}); }),
            ErrorCode::NoAnchorAvailable);
}

TEST(FindRelationalAnchor, ReadingOrderBreaksTies) {
  const ElementRecord target = element("Submit", centred(100, 100));
  const std::vector<ElementRecord> candidates = {element("Lower", centred(100, 160)),
                                                 element("Upper", centred(100, 40))};
  EXPECT_EQ(find_relational_anchor(target, candidates).anchor.text, "Upper");
}

TEST(FindRelationalAnchor, SkipsCandidatesWithoutDominantAxis) {
  const ElementRecord target = element("Submit", centred(100, 100));
  const std::vector<ElementRecord> candidates = {element("Diagonal", centred(130, 130)),
                                                 element("Far", centred(100, 300))};
  EXPECT_EQ(find_relational_anchor(target, candidates).anchor.text, "Far");
}

TEST(FindRelationalAnchor, MinimalOverRandomLayouts) {
  Rng rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const ElementRecord target = element("T", centred(rng.below(1000), rng.below(1000)), "button", "t");
    std::vector<ElementRecord> candidates;
    for (int i = 0; i < 12; ++i) {
      const std::string text = rng.below(4) == 0 ? "" : "c" + std::to_string(i);
      candidates.push_back(element(text, centred(rng.below(1000), rng.below(1000)), "a", "r" + std::to_string(i)));
    }
    AnchorChoice best;
    try {
      best = find_relational_anchor(target, candidates);
    } catch (const Error& e) {
      ASSERT_EQ(e.code(), ErrorCode::NoAnchorAvailable);
      continue;
    }
    for (const auto& c : candidates) {
      if (c.text.empty()) continue;
      try {
        spatial_direction(c.bbox, target.bbox);
      } catch (const Error&) {
        continue;
      }
      ASSERT_GE(center_distance(c.bbox, target.bbox), best.distance - 1e-9);
    }
  }
}

TEST(GenerateInstructions, ClickDirectAndRelational) {
  const TemplateSet t = templates();
  const ElementRecord target = element("Submit", centred(100, 100));
  const AnchorChoice anchor{element("Email", centred(100, 160), "input"), Direction::Above, 60};
  const InstructionPair p = generate_instructions(ActionKind::Click, target, anchor, t);
  EXPECT_EQ(p.direct, "Click on 'Submit' button");
  ASSERT_TRUE(p.relational.has_value());
  EXPECT_EQ(*p.relational, "Click on the button above 'Email'");
  EXPECT_EQ(p.anchor_text, "Email");
  EXPECT_EQ(p.direction, Direction::Above);
  EXPECT_EQ(p.direct.find("Email"), std::string::npos);
}

TEST(GenerateInstructions, TypeIntoSearchbox) {
  ElementRecord box = element("Search: suggestions appear below", centred(300, 50, 400, 30), "input");
  box.input_type = "search";
  const InstructionPair p = generate_instructions(ActionKind::Type, box, std::nullopt, templates(), "bed sheets queen");
  EXPECT_EQ(p.direct, "Type 'bed sheets queen' in 'Search: suggestions appear below' searchbox");
  EXPECT_FALSE(p.relational.has_value());
  EXPECT_FALSE(p.anchor_text.has_value());
}

TEST(GenerateInstructions, LeftRightPhrasesAndUntitledTargets) {
  const ElementRecord icon = element("", centred(100, 100), "button", "icon");
  const AnchorChoice anchor{element("Cart", centred(160, 100), "a"), Direction::Left, 60};
  const InstructionPair p = generate_instructions(ActionKind::Click, icon, anchor, templates());
  EXPECT_EQ(p.direct, "Click on the button");
  EXPECT_EQ(*p.relational, "Click on the button to the left of 'Cart'");
}

TEST(TemplateSet, MissingTemplate) {
  TemplateSet empty;
  EXPECT_EQ(code_of([&] { empty.get(ActionKind::Click, "direct"); }), ErrorCode::MissingTemplate);
  EXPECT_EQ(templates().size(), 9u);
}

TEST(FillTemplate, UnfilledSlotIsMissingTemplate) {
  EXPECT_EQ(fill_template("{a} and {a}", {{"a", "x"}}), "x and x");
  try {
    fill_template("{a} and {b}", {{"a", "x"}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingTemplate);
  }
}

TEST(ElementTypeLabel, Mapping) {
  ElementRecord e = element("x", centred(0, 0), "a");
  EXPECT_EQ(element_type_label(e), "link");
  e.role = "tab";
  EXPECT_EQ(element_type_label(e), "tab");
  e = element("x", centred(0, 0), "input");
  e.input_type = "submit";
  EXPECT_EQ(element_type_label(e), "button");
  e.input_type = "email";
  EXPECT_EQ(element_type_label(e), "textbox");
  EXPECT_EQ(element_type_label(element("x", centred(0, 0), "select")), "combobox");
}

TEST(CheckUnambiguous, DuplicateDirectTargets) {
  const ElementRecord a = element("Submit", centred(100, 100), "button", "1");
  const ElementRecord b = element("Submit", centred(100, 300), "button", "2");
  const InstructionPair p{"Click on 'Submit' button", std::nullopt, ActionKind::Click, std::nullopt, std::nullopt};
  const AmbiguityCheck check = check_unambiguous(p, InstructionType::Direct, {a, b}, a);
  EXPECT_FALSE(check.unambiguous);
  EXPECT_EQ(check.conflicts.size(), 2u);
  EXPECT_TRUE(check_unambiguous(p, InstructionType::Direct, {a}, a).unambiguous);
}

TEST(CheckUnambiguous, RelationalBand) {
  const ElementRecord email = element("Email", centred(100, 200, 200, 30), "input", "e");
  const ElementRecord near_btn = element("Go", centred(100, 150, 80, 30), "button", "1");
  const ElementRecord far_btn = element("Stop", centred(110, 80, 80, 30), "button", "2");
  const ElementRecord outside = element("Side", centred(400, 150, 80, 30), "button", "3");
  const InstructionPair p{"", "Click on the button above 'Email'", ActionKind::Click, "Email", Direction::Above};
  const AmbiguityCheck two = check_unambiguous(p, InstructionType::Relational, {email, near_btn, far_btn}, near_btn);
  EXPECT_FALSE(two.unambiguous);
  EXPECT_EQ(two.conflicts.size(), 2u);
  // Brute-force oracle: count buttons whose centre lies above the anchor
  // within 1.5x its width.
  int in_band = 0;
  for (const auto* e : {&near_btn, &far_btn, &outside}) {
    const Point c = e->bbox.center();
    if (c.y < 200 && std::abs(c.x - 100) <= 150) ++in_band;
  }
  EXPECT_EQ(in_band, 2);
  EXPECT_TRUE(check_unambiguous(p, InstructionType::Relational, {email, near_btn, outside}, near_btn).unambiguous);
}

TEST(InDirectionBand, CrossAxisWidenedByHalf) {
  const Bbox anchor{0, 100, 100, 20};  // centre (50, 110), band half-width 75
  EXPECT_TRUE(in_direction_band(anchor, Direction::Above, centred(124, 50)));
  EXPECT_FALSE(in_direction_band(anchor, Direction::Above, centred(126, 50)));
  EXPECT_FALSE(in_direction_band(anchor, Direction::Above, centred(50, 150)));
  EXPECT_TRUE(in_direction_band(anchor, Direction::Below, centred(50, 150)));
}

TEST(LiveInstruction, AnchorMinimalOnFixtures) {
  GP_REQUIRE_BROWSER();
  for (const char* name : {"login.mhtml", "shop.mhtml", "settings.mhtml"}) {
    SCOPED_TRACE(name);
    browser::PageHandle page = browser::load_archive(test::shared_session(), test::pages_dir() / name);
    const auto elements = browser::query_interactables(page);
    for (const auto& target : elements) {
      std::vector<ElementRecord> others;
      for (const auto& e : elements) {
        if (e.node_ref != target.node_ref) others.push_back(e);
      }
      const auto ranked = rank_anchors(target, others);
      if (ranked.empty()) continue;
      for (const auto& c : others) {
        if (c.text.empty()) continue;
        try {
          spatial_direction(c.bbox, target.bbox);
        } catch (const Error&) {
          continue;
        }
        EXPECT_GE(center_distance(c.bbox, target.bbox), ranked.front().distance - 1e-9);
      }
    }
  }
}

}  // namespace
}  // namespace gp::instr
