#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "gp/browser/session.hpp"
#include "gp/dataset/sample.hpp"

namespace gp::test {

namespace fs = std::filesystem;

fs::path fixture_dir();
fs::path pages_dir();
fs::path data_dir();

/// Browser for live tests: the configured build path, then GP_BROWSER, then
/// the PATH search. Empty when none is usable.
std::optional<fs::path> browser_path();
browser::SessionConfig session_config();

/// One browser per test process, launched on first use.
browser::Session& shared_session();

/// Removed with its contents on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }
  fs::path operator/(const fs::path& p) const { return path_ / p; }

 private:
  fs::path path_;
};

/// Uncompressed RGB PNG filled with one colour; enough for tests that only
/// need valid image bytes of a given size.
std::string solid_png(int width, int height, unsigned char r = 255, unsigned char g = 255,
                      unsigned char b = 255);

/// Single-part archive holding `html`, written to dir/name.
fs::path write_html_archive(const fs::path& dir, const std::string& name, const std::string& html);

/// A synthetic dataset of `steps` click steps over one blank screenshot of
/// width x height. Step i targets a 40x20 box at (20 + 50 (i % 5),
/// 20 + 30 ((i / 5) % 8)) with direct instruction "Click on 'Item i' button";
/// relational instructions are present unless i is in `no_relational`.
dataset::Dataset synthetic_dataset(const fs::path& dir, int steps, std::vector<VariantKind> variants,
                                   int width = 280, int height = 280,
                                   const std::vector<int>& no_relational = {});

/// Runs the CLI in-process and returns its exit code.
int run_cli(const std::vector<std::string>& args);

}  // namespace gp::test

#define GP_REQUIRE_BROWSER()                                                        \
  do {                                                                              \
    if (!gp::test::browser_path()) GTEST_SKIP() << "no headless browser available"; \
  } while (0)
