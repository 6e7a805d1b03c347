// Packs an HTML page and its resources into a single MHTML archive.
//
//   gp-pack-mhtml page.html --base https://example.test/ -r style.css -r logo.png -o page.mhtml
//
// Each resource is stored with Content-Location <base><file name>, so the
// page should reference resources by those absolute URLs.

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "gp/core/error.hpp"
#include "gp/core/io.hpp"
#include "gp/mhtml/archive.hpp"

namespace {

std::string media_type(const std::filesystem::path& p) {
  const std::string ext = gp::lowercase(p.extension().string());
  if (ext == ".html" || ext == ".htm") return "text/html";
  if (ext == ".css") return "text/css";
  if (ext == ".js") return "application/javascript";
  if (ext == ".png") return "image/png";
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".woff2") return "font/woff2";
  return "application/octet-stream";
}

// Text parts use CRLF line breaks, as browser-saved archives do; quoted-
// printable then encodes them as hard line breaks.
std::string crlf(std::string_view text) {
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\n' && (i == 0 || text[i - 1] != '\r')) out += '\r';
    out += text[i];
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pack an HTML page and resources into an MHTML archive"};
  std::filesystem::path page;
  std::filesystem::path output;
  std::string base = "https://fixtures.gui-perturb.test/";
  std::vector<std::filesystem::path> resources;
  app.add_option("page", page, "Root HTML document")->required()->check(CLI::ExistingFile);
  app.add_option("-o,--output", output, "Archive to write")->required();
  app.add_option("-b,--base", base, "URL prefix for Content-Location headers");
  app.add_option("-r,--resource", resources, "Resource file (repeatable)")->check(CLI::ExistingFile);
  CLI11_PARSE(app, argc, argv);

  try {
    std::vector<gp::mhtml::Part> parts;
    gp::mhtml::Part root;
    root.content_type = "text/html";
    root.content_location = base + page.filename().string();
    root.body = crlf(gp::read_file(page));
    parts.push_back(std::move(root));
    for (const auto& r : resources) {
      gp::mhtml::Part part;
      part.content_type = media_type(r);
      part.content_location = base + r.filename().string();
      part.body = gp::read_file(r);
      if (part.content_type.rfind("text/", 0) == 0) part.body = crlf(part.body);
      parts.push_back(std::move(part));
    }
    const std::string boundary = "----MultipartBoundary--gp" + gp::sha256_hex(parts[0].body).substr(0, 24);
    const std::string archive = gp::mhtml::write_archive(parts, boundary, page.stem().string());
    // Refuse to write something our own parser would reject.
    gp::mhtml::parse_archive(archive);
    gp::write_file_atomic(output, archive);
  } catch (const gp::Error& e) {
    std::cerr << "gp-pack-mhtml: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
