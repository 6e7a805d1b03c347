#include "support/support.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <random>

#include "gp/cli/commands.hpp"
#include "gp/core/error.hpp"
#include "gp/core/io.hpp"
#include "gp/mhtml/archive.hpp"

namespace gp::test {

fs::path fixture_dir() { return GP_FIXTURE_DIR; }
fs::path pages_dir() { return fixture_dir() / "pages"; }
fs::path data_dir() { return GP_DEFAULT_DATA_DIR; }

std::optional<fs::path> browser_path() {
  static const std::optional<fs::path> cached = []() -> std::optional<fs::path> {
    const fs::path configured = GP_TEST_BROWSER_PATH;
    std::error_code ec;
    if (!configured.empty() && fs::exists(configured, ec)) return configured;
    try {
      return browser::find_browser(browser::SessionConfig{});
    } catch (const Error&) {
      return std::nullopt;
    }
  }();
  return cached;
}

browser::SessionConfig session_config() {
  browser::SessionConfig config;
  config.browser_path = browser_path();
  return config;
}

browser::Session& shared_session() {
  static browser::Session session = browser::Session::launch(session_config());
  return session;
}

TempDir::TempDir() {
  std::random_device rd;
  const auto base = fs::temp_directory_path();
  for (;;) {
    path_ = base / ("gp-test-" + std::to_string(rd()));
    if (fs::create_directory(path_)) break;
  }
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

namespace {

std::uint32_t crc32(std::string_view bytes) {
  static const auto table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
      t[i] = c;
    }
    return t;
  }();
  std::uint32_t c = 0xFFFFFFFFu;
  for (unsigned char ch : bytes) c = table[(c ^ ch) & 0xFF] ^ (c >> 8);
  return c ^ 0xFFFFFFFFu;
}

void put_be32(std::string& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<char>((v >> shift) & 0xFF));
}

void put_chunk(std::string& out, std::string_view type, std::string_view data) {
  put_be32(out, static_cast<std::uint32_t>(data.size()));
  std::string body(type);
  body.append(data);
  out += body;
  put_be32(out, crc32(body));
}

}  // namespace

std::string solid_png(int width, int height, unsigned char r, unsigned char g, unsigned char b) {
  std::string raw;
  raw.reserve(static_cast<std::size_t>(height) * (1 + 3 * width));
  for (int y = 0; y < height; ++y) {
    raw.push_back(0);  // filter: none
    for (int x = 0; x < width; ++x) {
      raw.push_back(static_cast<char>(r));
      raw.push_back(static_cast<char>(g));
      raw.push_back(static_cast<char>(b));
    }
  }
  // zlib stream of stored deflate blocks.
  std::string z = {'\x78', '\x01'};
  for (std::size_t pos = 0; pos < raw.size() || pos == 0;) {
    const std::size_t len = std::min<std::size_t>(65535, raw.size() - pos);
    const bool last = pos + len == raw.size();
    z.push_back(last ? 1 : 0);
    z.push_back(static_cast<char>(len & 0xFF));
    z.push_back(static_cast<char>(len >> 8));
    z.push_back(static_cast<char>(~len & 0xFF));
    z.push_back(static_cast<char>((~len >> 8) & 0xFF));
    z.append(raw, pos, len);
    pos += len;
    if (last) break;
  }
  std::uint32_t a = 1, s = 0;
  for (unsigned char ch : raw) {
    a = (a + ch) % 65521;
    s = (s + a) % 65521;
  }
  put_be32(z, (s << 16) | a);

  std::string png = "\x89PNG\r\n\x1a\n";
  std::string ihdr;
  put_be32(ihdr, static_cast<std::uint32_t>(width));
  put_be32(ihdr, static_cast<std::uint32_t>(height));
  ihdr += std::string{'\x08', '\x02', '\x00', '\x00', '\x00'};  // 8-bit RGB
  put_chunk(png, "IHDR", ihdr);
  put_chunk(png, "IDAT", z);
  put_chunk(png, "IEND", "");
  return png;
}

fs::path write_html_archive(const fs::path& dir, const std::string& name, const std::string& html) {
  mhtml::Part part;
  part.content_type = "text/html";
  part.content_location = "https://fixtures.gui-perturb.test/" + name + ".html";
  part.body = html;
  const fs::path path = dir / name;
  write_file_atomic(path, mhtml::write_archive({part}, "----gp-test-boundary", name));
  return path;
}

dataset::Dataset synthetic_dataset(const fs::path& dir, int steps, std::vector<VariantKind> variants,
                                   int width, int height, const std::vector<int>& no_relational) {
  static constexpr std::array<const char*, 4> kDirections = {"above", "below", "left", "right"};
  fs::create_directories(dir);
  const std::string shot = dataset::store_screenshot(dir, solid_png(width, height));
  std::vector<dataset::SampleRecord> samples;
  for (int i = 0; i < steps; ++i) {
    for (VariantKind v : variants) {
      dataset::SampleRecord s;
      s.task_id = "synthetic";
      s.step_id = std::to_string(i);
      s.variant = v;
      s.screenshot = shot;
      s.image_dims = {width, height};
      s.viewport = {width, height};
      s.bbox = {20.0 + 50 * (i % 5), 20.0 + 30 * ((i / 5) % 8), 40, 20};
      s.instruction_direct = "Click on 'Item " + std::to_string(i) + "' button";
      if (std::find(no_relational.begin(), no_relational.end(), i) == no_relational.end()) {
        const std::string dir_name = kDirections[static_cast<std::size_t>(i) % 4];
        s.instruction_relational = "Click on the button " + dir_name + " 'Anchor " + std::to_string(i) + "'";
        s.anchor_text = "Anchor " + std::to_string(i);
        s.direction = dir_name;
      }
      s.applied_spec.kind = v;
      samples.push_back(std::move(s));
    }
  }
  dataset::write_samples(dir / "samples.jsonl", samples);
  return dataset::Dataset::load(dir);
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<std::string> full = {"gui-perturb"};
  full.insert(full.end(), args.begin(), args.end());
  return cli::run(full);
}

}  // namespace gp::test
