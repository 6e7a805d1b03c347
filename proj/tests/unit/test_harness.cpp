#include <cmath>
#include <regex>

#include "gp/core/error.hpp"
#include "gp/core/io.hpp"
#include "gp/core/random.hpp"
#include "gp/harness/mock_server.hpp"
#include "gp/harness/model.hpp"
#include "gp/harness/resize.hpp"
#include "gp/harness/runner.hpp"
#include "support/support.hpp"

namespace gp::harness {
namespace {

using nlohmann::json;

constexpr long long kMin = 100LL * 28 * 28;
constexpr long long kMax = 16384LL * 28 * 28;

// Straight transcription of the reference algorithm, kept separate from the
// implementation so the two can be compared.
std::pair<int, int> resize_oracle(int h, int w) {
  const auto round_to = [](double v) { return static_cast<long long>(std::nearbyint(v / 28.0)) * 28; };
  long long hh = std::max<long long>(28, round_to(h));
  long long ww = std::max<long long>(28, round_to(w));
  if (hh * ww > kMax) {
    const double beta = std::sqrt(static_cast<double>(h) * w / kMax);
    hh = static_cast<long long>(std::floor(h / beta / 28)) * 28;
    ww = static_cast<long long>(std::floor(w / beta / 28)) * 28;
  } else if (hh * ww < kMin) {
    const double beta = std::sqrt(static_cast<double>(kMin) / (static_cast<double>(h) * w));
    hh = static_cast<long long>(std::ceil(h * beta / 28)) * 28;
    ww = static_cast<long long>(std::ceil(w * beta / 28)) * 28;
  }
  return {static_cast<int>(hh), static_cast<int>(ww)};
}

TEST(SmartResize, Examples) {
  const ResizePlan a = smart_resize(1080, 1920);
  EXPECT_EQ(a.h, 1092);
  EXPECT_EQ(a.w, 1932);
  EXPECT_EQ(a.orig_h, 1080);
  EXPECT_EQ(a.orig_w, 1920);
  const ResizePlan b = smart_resize(280, 280);
  EXPECT_EQ(b.h, 280);
  EXPECT_TRUE(b.identity());
  const ResizePlan c = smart_resize(50, 50);
  EXPECT_EQ(c.h, 280);
  EXPECT_EQ(c.w, 280);
}

TEST(SmartResize, ErrorCases) {
  try {
    smart_resize(10, 3000);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AspectRatioExceeded);
  }
  EXPECT_THROW(smart_resize(0, 10), Error);
  EXPECT_THROW(smart_resize(10, -1), Error);
  EXPECT_NO_THROW(smart_resize(10, 2000));
}

TEST(SmartResize, PropertySuite) {
  Rng rng(2024);
  int checked = 0;
  int outside_domain = 0;
  while (checked < 10000) {
    const int h = static_cast<int>(rng.below(8000)) + 1;
    const int w = static_cast<int>(rng.below(8000)) + 1;
    if (std::max(h, w) > 200LL * std::min(h, w)) continue;
    ++checked;
    const ResizePlan p = smart_resize(h, w);
    ASSERT_EQ(p.h % 28, 0) << h << "x" << w;
    ASSERT_EQ(p.w % 28, 0) << h << "x" << w;
    const long long px = static_cast<long long>(p.h) * p.w;
    ASSERT_GE(px, kMin) << h << "x" << w;
    ASSERT_LE(px, kMax) << h << "x" << w;
    ASSERT_EQ(resize_oracle(h, w), std::make_pair(p.h, p.w)) << h << "x" << w;
    // Rounding a thin side down can push the output past 200:1 (40x8000 ->
    // 28x8008); such an output is itself outside the domain, so idempotence
    // is checked where the output satisfies the precondition.
    if (std::max(p.h, p.w) > 200 * std::min(p.h, p.w)) {
      ++outside_domain;
      continue;
    }
    const ResizePlan again = smart_resize(p.h, p.w);
    ASSERT_EQ(again.h, p.h) << h << "x" << w;
    ASSERT_EQ(again.w, p.w) << h << "x" << w;
  }
  EXPECT_LT(outside_domain, 100);
}

TEST(MapToOriginal, Examples) {
  const ResizePlan plan = smart_resize(1080, 1920);
  const Point p = map_to_original({966, 546}, plan);
  EXPECT_DOUBLE_EQ(p.x, 960.0);
  EXPECT_DOUBLE_EQ(p.y, 540.0);
  const ResizePlan same = smart_resize(280, 560);
  EXPECT_EQ(map_to_original({17.5, 200}, same), (Point{17.5, 200}));
  try {
    map_to_original({-50, 0}, plan);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PointOutOfRange);
  }
  // Just outside the frame is clamped.
  EXPECT_EQ(map_to_original({-1.5, 1093}, plan).x, 0.0);
  EXPECT_DOUBLE_EQ(map_to_original({-1.5, 1093}, plan).y, 1080.0);
}

TEST(MapToOriginal, RoundTripWithinHalfPixel) {
  Rng rng(9);
  for (int i = 0; i < 10000; ++i) {
    const int h = static_cast<int>(rng.below(3000)) + 100;
    const int w = static_cast<int>(rng.below(3000)) + 100;
    const ResizePlan plan = smart_resize(h, w);
    const Point orig{rng.unit() * w, rng.unit() * h};
    const Point r = map_to_resized(orig, plan);
    // Models answer in whole pixels.
    const Point back = map_to_original({std::round(r.x), std::round(r.y)}, plan);
    const double tol = 0.51 * std::max(static_cast<double>(w) / plan.w, static_cast<double>(h) / plan.h);
    ASSERT_LE(std::abs(back.x - orig.x), std::max(0.51, tol));
    ASSERT_LE(std::abs(back.y - orig.y), std::max(0.51, tol));
    ASSERT_EQ(map_to_original(r, plan).x, map_to_original(r, plan).x);
    ASSERT_NEAR(map_to_original(r, plan).x, orig.x, 1e-9);
    ASSERT_NEAR(map_to_original(r, plan).y, orig.y, 1e-9);
  }
}

TEST(ResizePng, ProducesPlannedDimensions) {
  const std::string png = test::solid_png(50, 30, 200, 10, 10);
  const ResizePlan plan = smart_resize(30, 50);
  const std::string out = resize_png(png, plan);
  const Size dims = browser::png_dimensions(out);
  EXPECT_EQ(dims.width, plan.w);
  EXPECT_EQ(dims.height, plan.h);
  EXPECT_EQ(resize_png(test::solid_png(280, 280), smart_resize(280, 280)), test::solid_png(280, 280));
  EXPECT_THROW(resize_png("garbage", plan), Error);
}

// ---- parsing ----

TEST(ParsePrediction, Literals) {
  EXPECT_EQ(parse_prediction(ModelFamily::UiTars, "Action: click(start_box='(639,438)')").point,
            (Point{639, 438}));
  EXPECT_EQ(parse_prediction(ModelFamily::UiTars,
                             "Thought: the blue button\nAction: click(start_box='<|box_start|>(12,34)<|box_end|>')")
                .point,
            (Point{12, 34}));
  EXPECT_EQ(parse_prediction(ModelFamily::Gta1, "Thought: the target is the search box\nAction: (512, 384)").point,
            (Point{512, 384}));
  EXPECT_EQ(parse_prediction(ModelFamily::Qwen,
                             "<tool_call>\n{\"name\": \"computer_use\", \"arguments\": {\"action\": "
                             "\"left_click\", \"coordinate\": [100, 200]}}\n</tool_call>")
                .point,
            (Point{100, 200}));
}

TEST(ParsePrediction, UnparsableIsParseFailed) {
  for (ModelFamily f : {ModelFamily::UiTars, ModelFamily::Gta1, ModelFamily::Qwen}) {
    try {
      parse_prediction(f, "I cannot find the element");
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::ParseFailed);
    }
  }
}

TEST(ParsePrediction, SeveralActionsTakeTheFirst) {
  const auto p = parse_prediction(ModelFamily::UiTars,
                                  "Action: click(start_box='(1,2)')\nAction: click(start_box='(3,4)')");
  EXPECT_EQ(p.point, (Point{1, 2}));
  EXPECT_TRUE(p.multiple_actions);
}

std::string random_padding(Rng& rng) {
  static const char* kPads[] = {"", " ", "\n", "  \n", "\t", "\r\n", "\n\n  "};
  return kPads[rng.below(7)];
}

TEST(ParsePrediction, FormatRoundTripFuzz) {
  Rng rng(77);
  for (ModelFamily f : {ModelFamily::UiTars, ModelFamily::Gta1, ModelFamily::Qwen}) {
    SCOPED_TRACE(std::string(to_string(f)));
    int misses = 0;
    for (int i = 0; i < 10000; ++i) {
      const Point p{static_cast<double>(rng.below(4000)), static_cast<double>(rng.below(4000))};
      const bool reasoning = rng.below(2) == 1;
      const std::string thought = "step " + std::to_string(i) + ": the element (near 5, 6) looks right";
      const std::string raw = random_padding(rng) + format_response(f, p, reasoning, thought) + random_padding(rng);
      try {
        if (!(parse_prediction(f, raw).point == p)) ++misses;
      } catch (const Error&) {
        ++misses;
      }
    }
    EXPECT_EQ(misses, 0);
  }
}

// ---- prompts ----

PromptSet prompts() { return PromptSet::load(test::data_dir() / "prompts"); }

json render(ModelFamily family, bool reasoning, const ResizePlan& plan) {
  EvalConfig c;
  c.family = family;
  c.reasoning = reasoning;
  return render_prompt(c, prompts(), "Click on 'Submit' button", plan, "PNGBYTES");
}

TEST(RenderPrompt, Gta1DeclaresResizedResolution) {
  const json m = render(ModelFamily::Gta1, true, smart_resize(1080, 1920));
  const std::string system = m.at(0).at("content").dump();
  EXPECT_EQ(m.at(0).at("role"), "system");
  EXPECT_NE(system.find("height 1092 and width 1932"), std::string::npos) << system;
  EXPECT_NE(m.dump().find("Thought:"), std::string::npos);
  EXPECT_NE(m.dump().find("data:image/png;base64," + base64_encode("PNGBYTES")), std::string::npos);
}

TEST(RenderPrompt, UiTarsWithoutReasoningOmitsThought) {
  const json m = render(ModelFamily::UiTars, false, smart_resize(800, 1280));
  EXPECT_EQ(m.at(0).at("content"), "You are a helpful assistant.");
  const std::string user = m.at(1).dump();
  EXPECT_NE(user.find("click(start_box="), std::string::npos);
  EXPECT_EQ(user.find("Thought:"), std::string::npos);
  EXPECT_NE(user.find("Click on 'Submit' button"), std::string::npos);
  EXPECT_NE(render(ModelFamily::UiTars, true, smart_resize(800, 1280)).dump().find("Thought:"),
            std::string::npos);
}

TEST(RenderPrompt, QwenDeclaresComputerUse) {
  const ResizePlan plan = smart_resize(800, 1280);
  const std::string all = render(ModelFamily::Qwen, true, plan).dump();
  EXPECT_NE(all.find("computer_use"), std::string::npos);
  EXPECT_NE(all.find("left_click"), std::string::npos);
  EXPECT_NE(all.find("Thought:"), std::string::npos);
  EXPECT_NE(all.find(std::to_string(plan.w) + "x" + std::to_string(plan.h)), std::string::npos) << all;
}

TEST(ModelFamily, Names) {
  EXPECT_EQ(parse_family("gta1"), ModelFamily::Gta1);
  try {
    parse_family("llava");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownFamily);
  }
  EvalConfig c;
  c.variant = VariantKind::TextShrink;
  c.instruction_type = InstructionType::Relational;
  c.reasoning = true;
  EXPECT_EQ(c.cell(), "text_shrink-relational-reasoning");
  EvalConfig back;
  parse_cell(c.cell(), back);
  EXPECT_EQ(back.cell(), c.cell());
}

// ---- runner ----

// Answers in UI-TARS format from the synthetic layout, keyed by the item
// number in the instruction; items in `malformed` get an unparsable reply.
class LayoutBackend : public ChatBackend {
 public:
  std::set<int> malformed;
  std::optional<Point> fixed;
  int fail_after = -1;  // calls before the endpoint "goes away"
  std::atomic<int> calls{0};

  ChatReply complete(const json& messages, const std::string&) override {
    const int n = calls++;
    if (fail_after >= 0 && n >= fail_after) throw Error(ErrorCode::EndpointUnreachable, "connection refused");
    if (fixed) return {format_response(ModelFamily::UiTars, *fixed, false)};
    static const std::regex kItem("(?:Item|Anchor) (\\d+)'");
    const std::string text = messages.dump();
    std::smatch m;
    if (!std::regex_search(text, m, kItem)) return {"no idea"};
    const int i = std::stoi(m[1]);
    if (malformed.count(i)) return {"I cannot find the element"};
    const Bbox b{20.0 + 50 * (i % 5), 20.0 + 30 * ((i / 5) % 8), 40, 20};
    return {format_response(ModelFamily::UiTars, b.center(), false)};
  }
};

RunOptions options(const std::filesystem::path& dir) {
  RunOptions o;
  o.out_dir = dir;
  o.parallelism = 4;
  o.backoff_ms = 0;
  return o;
}

EvalConfig config(InstructionType type = InstructionType::Direct) {
  EvalConfig c;
  c.model_name = "fake/model";
  c.instruction_type = type;
  return c;
}

TEST(Runner, MalformedAnswersAreMisses) {
  test::TempDir dir;
  const auto d = test::synthetic_dataset(dir / "ds", 390, {VariantKind::Original});
  LayoutBackend backend;
  backend.malformed = {3, 50, 101, 202, 389};
  const RunResult r = run_configuration(d, config(), backend, prompts(), options(dir / "out"));
  ASSERT_EQ(r.records.size(), 390u);
  int parse_errors = 0, hits = 0;
  for (const auto& rec : r.records) {
    if (rec.parse_error) {
      ++parse_errors;
      EXPECT_FALSE(rec.point.has_value());
      EXPECT_FALSE(rec.scored_hit());
    }
    hits += rec.scored_hit();
  }
  EXPECT_EQ(parse_errors, 5);
  EXPECT_EQ(hits, 385);
  EXPECT_TRUE(std::is_sorted(r.records.begin(), r.records.end(),
                             [](const auto& a, const auto& b) { return a.sample_id < b.sample_id; }));
  const PredictionFile f = PredictionFile::load(r.path);
  EXPECT_EQ(f.header.total, 390u);
  EXPECT_EQ(f.records.size(), 390u);
  EXPECT_EQ(r.path.filename(), "predictions_fake_model_original-direct-noreasoning.jsonl");
}

TEST(Runner, FixedOriginAnswerMissesEverything) {
  test::TempDir dir;
  const auto d = test::synthetic_dataset(dir / "ds", 40, {VariantKind::Original});
  LayoutBackend backend;
  backend.fixed = Point{0, 0};
  const RunResult r = run_configuration(d, config(), backend, prompts(), options(dir / "out"));
  for (const auto& rec : r.records) EXPECT_FALSE(rec.scored_hit());
}

TEST(Runner, ResumeReusesRecordsAndIsByteIdentical) {
  test::TempDir dir;
  const auto d = test::synthetic_dataset(dir / "ds", 30, {VariantKind::Original});
  LayoutBackend backend;
  const RunResult first = run_configuration(d, config(), backend, prompts(), options(dir / "out"));
  const std::string bytes = read_file(first.path);
  LayoutBackend second_backend;
  const RunResult second = run_configuration(d, config(), second_backend, prompts(), options(dir / "out"));
  EXPECT_EQ(second.resumed, 30u);
  EXPECT_EQ(second_backend.calls, 0);
  EXPECT_EQ(read_file(second.path), bytes);
}

TEST(Runner, UnreachableEndpointLeavesPartialFileForResume) {
  test::TempDir dir;
  const auto d = test::synthetic_dataset(dir / "ds", 20, {VariantKind::Original});
  LayoutBackend flaky;
  flaky.fail_after = 8;
  RunOptions o = options(dir / "out");
  o.parallelism = 1;
  try {
    run_configuration(d, config(), flaky, prompts(), o);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EndpointUnreachable);
  }
  const auto path = dir / "out" / predictions_filename("fake/model", config().cell());
  const PredictionFile partial = PredictionFile::load(path);
  EXPECT_EQ(partial.records.size(), 8u);

  LayoutBackend healthy;
  const RunResult r = run_configuration(d, config(), healthy, prompts(), o);
  EXPECT_EQ(r.resumed, 8u);
  EXPECT_EQ(healthy.calls, 12);
  EXPECT_EQ(r.records.size(), 20u);
}

TEST(Runner, RelationalSkipsSamplesWithoutRelationalInstruction) {
  test::TempDir dir;
  const auto d = test::synthetic_dataset(dir / "ds", 30, {VariantKind::Original}, 280, 280, {1, 2, 3, 4, 5});
  LayoutBackend backend;
  const RunResult r = run_configuration(d, config(InstructionType::Relational), backend, prompts(),
                                        options(dir / "out"));
  EXPECT_EQ(r.skipped, 5u);
  EXPECT_EQ(r.records.size(), 25u);
  const PredictionFile f = PredictionFile::load(r.path);
  EXPECT_EQ(f.header.skipped, 5u);
  EXPECT_EQ(f.header.skipped_ids.size(), 5u);
  for (const auto& rec : f.records) EXPECT_TRUE(rec.direction.has_value());
}

TEST(Runner, RetryRecoversFromTransientFailure) {
  class Flaky : public ChatBackend {
   public:
    int calls = 0;
    ChatReply complete(const json&, const std::string&) override {
      if (++calls < 3) throw Error(ErrorCode::EndpointUnreachable, "refused");
      return {"ok"};
    }
  } flaky;
  EXPECT_EQ(complete_with_retry(flaky, json::array(), "m", 3, 0), "ok");
  Flaky again;
  EXPECT_THROW(complete_with_retry(again, json::array(), "m", 2, 0), Error);
}

// ---- mock server ----

json request_for(const dataset::Dataset& d, const dataset::SampleRecord& s, ModelFamily family,
                 bool reasoning, const std::string& instruction) {
  EvalConfig c;
  c.family = family;
  c.reasoning = reasoning;
  const std::string png = read_file(d.screenshot_path(s));
  const ResizePlan plan = smart_resize(s.image_dims.height, s.image_dims.width);
  return json{{"model", "m"}, {"messages", render_prompt(c, prompts(), instruction, plan, resize_png(png, plan))}};
}

TEST(MockServer, OracleAnswersBboxCentreInEveryFamily) {
  test::TempDir dir;
  const auto d = test::synthetic_dataset(dir.path(), 6, {VariantKind::Original}, 560, 420);
  const MockModelServer mock(d, MockBehavior{});
  for (ModelFamily f : {ModelFamily::UiTars, ModelFamily::Gta1, ModelFamily::Qwen}) {
    for (bool reasoning : {false, true}) {
      for (const auto& s : d.samples) {
        const json reply = mock.respond(request_for(d, s, f, reasoning, *s.instruction_relational));
        const ResizePlan plan = smart_resize(s.image_dims.height, s.image_dims.width);
        const Point p = map_to_original(parse_prediction(f, completion_text(reply)).point, plan);
        EXPECT_TRUE(s.bbox.contains(Bbox{p.x, p.y, 0, 0})) << to_string(f) << " " << dataset::sample_id(s);
      }
    }
  }
}

TEST(MockServer, BehaviorSpecs) {
  const auto fixed = MockBehavior::parse("fixed:3,4");
  EXPECT_EQ(fixed.mode, MockBehavior::Mode::Fixed);
  EXPECT_EQ(fixed.fixed, (Point{3, 4}));
  const auto off = MockBehavior::parse("offset:100:precision,style");
  EXPECT_EQ(off.mode, MockBehavior::Mode::Offset);
  EXPECT_EQ(off.offset, 100);
  EXPECT_EQ(off.offset_variants, (std::set<VariantKind>{VariantKind::Precision, VariantKind::Style}));
  EXPECT_THROW(MockBehavior::parse("random"), Error);
  EXPECT_THROW(MockBehavior::parse("offset:abc"), Error);
}

TEST(MockServer, OffsetShiftsOnlyListedVariants) {
  test::TempDir dir;
  auto d = test::synthetic_dataset(dir.path(), 2, {VariantKind::Original, VariantKind::Precision});
  // The mock tells variants apart by their screenshots.
  const std::string other = dataset::store_screenshot(dir.path(), test::solid_png(280, 280, 9, 9, 9));
  for (auto& s : d.samples) {
    if (s.variant == VariantKind::Precision) s.screenshot = other;
  }
  const MockModelServer mock(d, MockBehavior::parse("offset:100:precision"));
  for (const auto& s : d.samples) {
    const json reply = mock.respond(request_for(d, s, ModelFamily::Gta1, false, s.instruction_direct));
    const Point p = parse_prediction(ModelFamily::Gta1, completion_text(reply)).point;
    const bool inside = s.bbox.contains(Bbox{p.x, p.y, 0, 0});
    EXPECT_EQ(inside, s.variant != VariantKind::Precision) << dataset::sample_id(s);
  }
}

TEST(MockServer, ServesOverHttp) {
  test::TempDir dir;
  const auto d = test::synthetic_dataset(dir / "ds", 12, {VariantKind::Original});
  MockModelServer mock(d, MockBehavior{});
  mock.start();
  HttpBackendOptions o;
  o.endpoint = mock.endpoint();
  auto backend = make_http_backend(o);
  const RunResult r = run_configuration(d, config(), *backend, prompts(), options(dir / "out"));
  mock.stop();
  ASSERT_EQ(r.records.size(), 12u);
  for (const auto& rec : r.records) EXPECT_TRUE(rec.scored_hit()) << rec.raw_response;
  EXPECT_EQ(mock.requests(), 12u);
}

TEST(HttpBackend, ClosedPortIsEndpointUnreachable) {
  HttpBackendOptions o;
  o.endpoint = "http://127.0.0.1:1/v1";
  o.timeout_s = 2;
  auto backend = make_http_backend(o);
  try {
    backend->complete(json::array(), "m");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EndpointUnreachable);
  }
}

}  // namespace
}  // namespace gp::harness
