#include <algorithm>
#include <map>
#include <numeric>
#include <vector>

#include "gp/core/error.hpp"
#include "gp/core/geometry.hpp"
#include "gp/core/io.hpp"
#include "gp/core/random.hpp"
#include "gp/core/variant_kind.hpp"
#include "support/support.hpp"

namespace gp {
namespace {

TEST(Rng, SameSeedSameSequence) {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next(), b.next());
}

TEST(Rng, EngineMatchesStandardSequence) {
  // The 10000th output of a default-seeded mt19937_64 is fixed by the standard.
  Rng rng(5489);
  std::uint64_t v = 0;
  for (int i = 0; i < 10000; ++i) v = rng.next();
  EXPECT_EQ(v, 9981545732273789042ULL);
}

TEST(Rng, BelowStaysInRangeAndCoversIt) {
  Rng rng(7);
  std::vector<int> counts(6, 0);
  for (int i = 0; i < 60000; ++i) {
    const auto v = rng.below(6);
    ASSERT_LT(v, 6u);
    ++counts[v];
  }
  for (int c : counts) EXPECT_NEAR(c, 10000, 500);
}

TEST(Rng, UnitInHalfOpenInterval) {
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.unit();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Rng, ShuffleIsPermutationAndDeterministic) {
  std::vector<int> a(20), b(20);
  std::iota(a.begin(), a.end(), 0);
  b = a;
  Rng r1(3), r2(3);
  r1.shuffle(std::span<int>(a));
  r2.shuffle(std::span<int>(b));
  EXPECT_EQ(a, b);
  std::vector<int> sorted = a;
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> expected(20);
  std::iota(expected.begin(), expected.end(), 0);
  EXPECT_EQ(sorted, expected);
}

TEST(Rng, SubstreamsDiffer) {
  Rng a = Rng::substream(0, 0);
  Rng b = Rng::substream(0, 1);
  EXPECT_NE(a.next(), b.next());
  EXPECT_EQ(Rng::substream(9, 4).next(), Rng::substream(9, 4).next());
}

TEST(Io, Base64RoundTrip) {
  for (const std::string s : {"", "f", "fo", "foo", "foob", "fooba", "foobar"}) {
    EXPECT_EQ(base64_decode(base64_encode(s)), s);
  }
  EXPECT_EQ(base64_encode("foobar"), "Zm9vYmFy");
  EXPECT_EQ(base64_decode("Zm9v\r\nYmFy"), "foobar");
}

TEST(Io, Base64RejectsBadInputWithOffset) {
  try {
    base64_decode("Zm9v!mFy", 100);
    FAIL() << "expected DecodeError";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DecodeError);
    ASSERT_TRUE(e.offset().has_value());
    EXPECT_EQ(*e.offset(), 104u);
  }
}

TEST(Io, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Io, AtomicWriteAndJsonl) {
  test::TempDir dir;
  const auto path = dir / "nested" / "x.jsonl";
  write_file_atomic(path, "{\"a\":1}\n\n{\"a\":2}\n");
  const auto lines = read_jsonl(path);
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[1]["a"], 2);
  EXPECT_EQ(read_file(path).size(), 17u);
}

TEST(Io, ReadMissingFileIsIoError) {
  try {
    read_file("/nonexistent/gp/file");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IoError);
  }
}

TEST(Io, StringHelpers) {
  EXPECT_EQ(lowercase("AbC"), "abc");
  EXPECT_EQ(trim("  x y \t\n"), "x y");
}

TEST(Geometry, CenterAndContainment) {
  const Bbox b{10, 20, 30, 40};
  EXPECT_EQ(b.center(), (Point{25, 40}));
  EXPECT_TRUE(b.contains({10, 20, 30, 40}));
  EXPECT_FALSE(b.contains({9, 20, 30, 40}));
  EXPECT_TRUE(b.contains({9, 20, 30, 40}, 1));
  EXPECT_EQ(b.scaled(0.5), (Bbox{5, 10, 15, 20}));
}

TEST(Geometry, IouAndDistance) {
  EXPECT_DOUBLE_EQ(intersection_over_union({0, 0, 10, 10}, {0, 0, 10, 10}), 1.0);
  EXPECT_DOUBLE_EQ(intersection_over_union({0, 0, 10, 10}, {5, 0, 10, 10}), 50.0 / 150.0);
  EXPECT_DOUBLE_EQ(intersection_over_union({0, 0, 10, 10}, {20, 20, 5, 5}), 0.0);
  EXPECT_DOUBLE_EQ(center_distance({0, 0, 2, 2}, {3, 4, 2, 2}), 5.0);
}

TEST(Geometry, JsonRoundTrip) {
  const Bbox b{1.5, 2, 3, 4.25};
  EXPECT_EQ(nlohmann::json(b).get<Bbox>(), b);
  const Size s{1280, 800};
  EXPECT_EQ(nlohmann::json(s).get<Size>(), s);
}

TEST(VariantKind, NamesRoundTrip) {
  for (VariantKind v : kAllVariants) EXPECT_EQ(parse_variant_kind(to_string(v)), v);
  EXPECT_EQ(parse_instruction_type("relational"), InstructionType::Relational);
  EXPECT_THROW(parse_variant_kind("blur"), Error);
}

TEST(Error, MessageCarriesCode) {
  const Error e(ErrorCode::TargetLost, "gone");
  EXPECT_NE(std::string(e.what()).find("TargetLost"), std::string::npos);
  EXPECT_NE(std::string(e.what()).find("gone"), std::string::npos);
}

}  // namespace
}  // namespace gp
