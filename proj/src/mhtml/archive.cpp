#include "gp/mhtml/archive.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <set>

#include "gp/core/error.hpp"
#include "gp/core/io.hpp"

namespace gp::mhtml {

namespace {

using Headers = std::map<std::string, std::string>;

struct HeaderBlock {
  Headers headers;
  std::size_t body_start = 0;
};

std::size_t line_end(std::string_view s, std::size_t pos) {
  const std::size_t nl = s.find('\n', pos);
  return nl == std::string_view::npos ? s.size() : nl;
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

// Reads header lines starting at `pos` up to the first empty line. Folded
// continuation lines (leading space or tab) are joined with a single space.
HeaderBlock parse_headers(std::string_view s, std::size_t pos) {
  HeaderBlock block;
  std::string current_name;
  while (true) {
    if (pos >= s.size()) {
      throw Error(ErrorCode::MalformedMime, "header block not terminated", pos);
    }
    const std::size_t end = line_end(s, pos);
    const std::string_view line = strip_cr(s.substr(pos, end - pos));
    const std::size_t next = end < s.size() ? end + 1 : end;
    if (line.empty()) {
      block.body_start = next;
      return block;
    }
    if ((line.front() == ' ' || line.front() == '\t') && !current_name.empty()) {
      auto& value = block.headers[current_name];
      value += ' ';
      value += trim(line);
    } else {
      const std::size_t colon = line.find(':');
      if (colon == std::string_view::npos) {
        throw Error(ErrorCode::MalformedMime, "header line without ':'", pos);
      }
      current_name = lowercase(trim(line.substr(0, colon)));
      block.headers[current_name] = std::string(trim(line.substr(colon + 1)));
    }
    if (next == end) {
      throw Error(ErrorCode::MalformedMime, "header block not terminated", pos);
    }
    pos = next;
  }
}

struct ContentType {
  std::string media_type;
  std::map<std::string, std::string> params;
};

ContentType parse_content_type(std::string_view value) {
  ContentType ct;
  std::vector<std::string> pieces;
  std::string current;
  bool quoted = false;
  for (char ch : value) {
    if (ch == '"') {
      quoted = !quoted;
      current.push_back(ch);
    } else if (ch == ';' && !quoted) {
      pieces.push_back(current);
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  pieces.push_back(current);
  ct.media_type = lowercase(trim(pieces.front()));
  for (std::size_t i = 1; i < pieces.size(); ++i) {
    const std::string_view piece = trim(pieces[i]);
    const std::size_t eq = piece.find('=');
    if (eq == std::string_view::npos) continue;
    std::string_view v = trim(piece.substr(eq + 1));
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
    ct.params[lowercase(trim(piece.substr(0, eq)))] = std::string(v);
  }
  return ct;
}

std::optional<std::string> header(const Headers& headers, const std::string& name) {
  const auto it = headers.find(name);
  if (it == headers.end()) return std::nullopt;
  return it->second;
}

int hex_value(char ch) {
  if (ch >= '0' && ch <= '9') return ch - '0';
  if (ch >= 'A' && ch <= 'F') return ch - 'A' + 10;
  if (ch >= 'a' && ch <= 'f') return ch - 'a' + 10;
  return -1;
}

bool plausible_url(std::string_view url) {
  if (url.empty()) return false;
  return std::none_of(url.begin(), url.end(), [](char ch) {
    const auto u = static_cast<unsigned char>(ch);
    return u < 0x20 || u == 0x7f || ch == ' ';
  });
}

// Locates "--boundary" at the start of a line at or after `from`.
std::size_t find_delimiter(std::string_view s, std::string_view delim, std::size_t from) {
  std::size_t pos = from;
  while (true) {
    pos = s.find(delim, pos);
    if (pos == std::string_view::npos) return pos;
    if (pos == 0 || s[pos - 1] == '\n') return pos;
    ++pos;
  }
}

Part decode_part(std::string_view s, std::size_t begin, std::size_t end,
                 std::vector<Warning>& warnings) {
  const HeaderBlock block = parse_headers(s.substr(0, end), begin);
  Part part;
  part.source_offset = begin;
  const auto ct = header(block.headers, "content-type");
  part.content_type = ct ? parse_content_type(*ct).media_type : "text/plain";
  part.content_location = header(block.headers, "content-location");
  if (auto cid = header(block.headers, "content-id")) {
    std::string_view id = *cid;
    if (id.size() >= 2 && id.front() == '<' && id.back() == '>') id = id.substr(1, id.size() - 2);
    part.content_id = std::string(id);
  }
  if (!part.content_location && !part.content_id) {
    throw Error(ErrorCode::MalformedMime, "part has neither Content-Location nor Content-ID",
                begin);
  }
  if (part.content_location && !plausible_url(*part.content_location)) {
    warnings.push_back({begin, "implausible Content-Location '" + *part.content_location + "'"});
  }

  const std::string_view raw = s.substr(block.body_start, end - block.body_start);
  const std::string encoding =
      lowercase(trim(header(block.headers, "content-transfer-encoding").value_or("7bit")));
  if (encoding == "quoted-printable") {
    part.transfer_encoding = TransferEncoding::QuotedPrintable;
    part.body = decode_quoted_printable(raw, block.body_start);
  } else if (encoding == "base64") {
    part.transfer_encoding = TransferEncoding::Base64;
    part.body = decode_base64(raw, block.body_start);
  } else {
    if (encoding == "7bit") {
      part.transfer_encoding = TransferEncoding::SevenBit;
    } else if (encoding == "8bit") {
      part.transfer_encoding = TransferEncoding::EightBit;
    } else {
      part.transfer_encoding = TransferEncoding::Binary;
      if (encoding != "binary") {
        warnings.push_back(
            {begin, "unknown transfer encoding '" + encoding + "' treated as binary"});
      }
    }
    part.body = std::string(raw);
  }
  return part;
}

}  // namespace

std::string_view to_string(TransferEncoding encoding) {
  switch (encoding) {
    case TransferEncoding::QuotedPrintable: return "quoted-printable";
    case TransferEncoding::Base64: return "base64";
    case TransferEncoding::SevenBit: return "7bit";
    case TransferEncoding::EightBit: return "8bit";
    case TransferEncoding::Binary: return "binary";
  }
  return "binary";
}

std::string decode_quoted_printable(std::string_view encoded, std::size_t base_offset) {
  std::string out;
  out.reserve(encoded.size());
  for (std::size_t i = 0; i < encoded.size(); ++i) {
    const char ch = encoded[i];
    if (ch != '=') {
      out.push_back(ch);
      continue;
    }
    // Soft line break: "=" followed by optional whitespace and a newline.
    std::size_t j = i + 1;
    while (j < encoded.size() && (encoded[j] == ' ' || encoded[j] == '\t')) ++j;
    if (j < encoded.size() && encoded[j] == '\r' && j + 1 < encoded.size() &&
        encoded[j + 1] == '\n') {
      i = j + 1;
      continue;
    }
    if (j < encoded.size() && encoded[j] == '\n') {
      i = j;
      continue;
    }
    if (j == encoded.size()) {
      i = j;
      continue;
    }
    if (i + 2 >= encoded.size()) {
      throw Error(ErrorCode::DecodeError, "truncated quoted-printable escape", base_offset + i);
    }
    const int hi = hex_value(encoded[i + 1]);
    const int lo = hex_value(encoded[i + 2]);
    if (hi < 0 || lo < 0) {
      throw Error(ErrorCode::DecodeError, "invalid quoted-printable escape", base_offset + i);
    }
    out.push_back(static_cast<char>((hi << 4) | lo));
    i += 2;
  }
  return out;
}

std::string decode_base64(std::string_view encoded, std::size_t base_offset) {
  return base64_decode(encoded, base_offset);
}

Archive parse_archive(std::string_view bytes) {
  if (bytes.empty()) throw Error(ErrorCode::MalformedMime, "empty input", 0);

  const HeaderBlock top = parse_headers(bytes, 0);
  const auto top_ct = header(top.headers, "content-type");
  if (!top_ct) throw Error(ErrorCode::MalformedMime, "missing Content-Type", 0);
  const ContentType ct = parse_content_type(*top_ct);

  Archive archive;
  if (ct.media_type.rfind("multipart/", 0) != 0) {
    // A bare single-resource document: treat the whole file as one part.
    archive.parts.push_back(decode_part(bytes, 0, bytes.size(), archive.warnings));
  } else {
    const auto boundary = ct.params.find("boundary");
    if (boundary == ct.params.end() || boundary->second.empty()) {
      throw Error(ErrorCode::MalformedMime, "multipart without boundary parameter", 0);
    }
    archive.boundary = boundary->second;
    const std::string delim = "--" + archive.boundary;

    std::size_t pos = find_delimiter(bytes, delim, top.body_start);
    if (pos == std::string_view::npos) {
      throw Error(ErrorCode::MalformedMime, "boundary never occurs in body", top.body_start);
    }
    while (true) {
      const std::size_t after = pos + delim.size();
      if (bytes.substr(after, 2) == "--") break;  // close delimiter
      const std::size_t part_begin = std::min(line_end(bytes, after) + 1, bytes.size());
      const std::size_t next = find_delimiter(bytes, delim, part_begin);
      if (next == std::string_view::npos) {
        throw Error(ErrorCode::MalformedMime, "truncated part (no closing boundary)", part_begin);
      }
      // The line break preceding a delimiter belongs to the delimiter.
      std::size_t part_end = next;
      if (part_end > part_begin && bytes[part_end - 1] == '\n') --part_end;
      if (part_end > part_begin && bytes[part_end - 1] == '\r') --part_end;
      archive.parts.push_back(decode_part(bytes, part_begin, part_end, archive.warnings));
      pos = next;
    }
  }

  const auto html = std::find_if(archive.parts.begin(), archive.parts.end(),
                                 [](const Part& p) { return p.content_type == "text/html"; });
  if (html == archive.parts.end()) {
    throw Error(ErrorCode::NoHtmlPart, "archive contains no text/html part", 0);
  }
  archive.main_index = static_cast<std::size_t>(html - archive.parts.begin());
  return archive;
}

Archive load_archive_file(const std::filesystem::path& path) {
  Archive archive = parse_archive(read_file(path));
  archive.source_path = path;
  return archive;
}

const Part& main_document(const Archive& archive) { return archive.parts.at(archive.main_index); }

namespace {

std::string extension_for(const std::string& content_type) {
  static const std::map<std::string, std::string> kExt = {
      {"text/html", ".html"},        {"text/css", ".css"},
      {"image/png", ".png"},         {"image/jpeg", ".jpg"},
      {"image/gif", ".gif"},         {"image/svg+xml", ".svg"},
      {"image/webp", ".webp"},       {"application/javascript", ".js"},
      {"text/javascript", ".js"},    {"font/woff2", ".woff2"},
      {"font/woff", ".woff"},        {"application/json", ".json"},
  };
  const auto it = kExt.find(content_type);
  return it == kExt.end() ? ".bin" : it->second;
}

std::string sanitize_name(const Part& part, std::size_t index) {
  std::string source = part.content_location.value_or(part.content_id.value_or(""));
  const std::size_t cut = source.find_first_of("?#");
  if (cut != std::string::npos) source.resize(cut);
  while (!source.empty() && source.back() == '/') source.pop_back();
  const std::size_t slash = source.find_last_of('/');
  std::string name = slash == std::string::npos ? source : source.substr(slash + 1);
  for (char& ch : name) {
    const auto u = static_cast<unsigned char>(ch);
    if (!(std::isalnum(u) || ch == '.' || ch == '-' || ch == '_')) ch = '_';
  }
  if (name.empty() || name == "." || name == "..") name = "part" + std::to_string(index);
  if (name.find('.') == std::string::npos || name.front() == '.') {
    name += extension_for(part.content_type);
  }
  return name;
}

}  // namespace

std::map<std::string, std::string> unpack_to_directory(const Archive& archive,
                                                       const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());

  std::map<std::string, std::size_t> name_counts;
  std::vector<std::string> names;
  names.reserve(archive.parts.size());
  for (std::size_t i = 0; i < archive.parts.size(); ++i) {
    names.push_back(sanitize_name(archive.parts[i], i));
    ++name_counts[names.back()];
  }

  std::map<std::string, std::string> manifest;
  std::set<std::string> used;
  for (std::size_t i = 0; i < archive.parts.size(); ++i) {
    const Part& part = archive.parts[i];
    std::string name = names[i];
    if (name_counts[name] > 1 || used.count(name)) {
      const std::size_t dot = name.find_last_of('.');
      name = name.substr(0, dot) + "_" + std::to_string(i) + name.substr(dot);
    }
    used.insert(name);
    try {
      write_file_atomic(dir / name, part.body);
    } catch (const Error& e) {
      throw Error(ErrorCode::IoError, e.what());
    }
    const std::string key =
        part.content_location ? *part.content_location : "cid:" + *part.content_id;
    manifest[key] = name;
  }
  write_file_atomic(dir / "manifest.json", nlohmann::json(manifest).dump(2) + "\n");
  return manifest;
}

std::string encode_quoted_printable(std::string_view bytes) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  std::size_t line = 0;
  const auto emit = [&](std::string_view token) {
    if (line + token.size() > 75) {
      out += "=\r\n";
      line = 0;
    }
    out += token;
    line += token.size();
  };
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    const auto u = static_cast<unsigned char>(bytes[i]);
    if (u == '\r' && i + 1 < bytes.size() && bytes[i + 1] == '\n') {
      out += "\r\n";
      line = 0;
      ++i;
      continue;
    }
    const bool at_line_end = i + 1 == bytes.size() || bytes[i + 1] == '\r' || bytes[i + 1] == '\n';
    const bool literal = (u >= 33 && u <= 126 && u != '=') || ((u == ' ' || u == '\t') && !at_line_end);
    if (literal) {
      const char ch = static_cast<char>(u);
      emit(std::string_view(&ch, 1));
    } else {
      const char token[3] = {'=', kHex[u >> 4], kHex[u & 15]};
      emit(std::string_view(token, 3));
    }
  }
  return out;
}

std::string write_archive(const std::vector<Part>& parts, std::string_view boundary,
                          std::string_view subject) {
  std::string out;
  out += "From: <Saved by gui-perturb>\r\n";
  out += "Subject: " + std::string(subject) + "\r\n";
  out += "MIME-Version: 1.0\r\n";
  out += "Content-Type: multipart/related;\r\n\ttype=\"text/html\";\r\n\tboundary=\"" +
         std::string(boundary) + "\"\r\n\r\n";
  for (const Part& part : parts) {
    const bool text = part.content_type.rfind("text/", 0) == 0 ||
                      part.content_type == "application/javascript";
    out += "--" + std::string(boundary) + "\r\n";
    out += "Content-Type: " + part.content_type + "\r\n";
    if (part.content_id) out += "Content-ID: <" + *part.content_id + ">\r\n";
    out += std::string("Content-Transfer-Encoding: ") + (text ? "quoted-printable" : "base64") + "\r\n";
    if (part.content_location) out += "Content-Location: " + *part.content_location + "\r\n";
    out += "\r\n";
    if (text) {
      out += encode_quoted_printable(part.body);
    } else {
      const std::string encoded = base64_encode(part.body);
      for (std::size_t i = 0; i < encoded.size(); i += 76) {
        out += encoded.substr(i, 76);
        if (i + 76 < encoded.size()) out += "\r\n";
      }
    }
    out += "\r\n";
  }
  out += "--" + std::string(boundary) + "--\r\n";
  return out;
}

}  // namespace gp::mhtml
