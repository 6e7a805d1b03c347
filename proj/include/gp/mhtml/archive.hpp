#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gp::mhtml {

enum class TransferEncoding { QuotedPrintable, Base64, SevenBit, EightBit, Binary };

std::string_view to_string(TransferEncoding encoding);

struct Part {
  std::string content_type;  // lowercased media type without parameters
  std::optional<std::string> content_location;
  std::optional<std::string> content_id;
  TransferEncoding transfer_encoding = TransferEncoding::Binary;
  std::string body;  // fully decoded
  std::size_t source_offset = 0;
};

/// Non-fatal oddities found while parsing, e.g. an unknown transfer encoding
/// that was passed through as binary.
struct Warning {
  std::size_t offset = 0;
  std::string message;
};

struct Archive {
  std::filesystem::path source_path;
  std::string boundary;
  std::vector<Part> parts;
  std::size_t main_index = 0;
  std::vector<Warning> warnings;
};

/// Parses an RFC 2557 multipart/related archive. Throws gp::Error with code
/// MalformedMime, NoHtmlPart or DecodeError; each carries the byte offset.
Archive parse_archive(std::string_view bytes);

/// Reads and parses a file, recording its path on the result.
Archive load_archive_file(const std::filesystem::path& path);

const Part& main_document(const Archive& archive);

/// Writes each part to `dir` and a manifest.json mapping content location (or
/// "cid:<id>" for parts that only carry a Content-ID) to the relative file
/// path. Returns the manifest. Output is a pure function of the archive.
std::map<std::string, std::string> unpack_to_directory(const Archive& archive,
                                                       const std::filesystem::path& dir);

/// Serializes parts as a multipart/related archive with CRLF line endings
/// (browsers only accept CRLF archives). Text parts are quoted-printable,
/// everything else base64; the first part is the root document.
std::string write_archive(const std::vector<Part>& parts, std::string_view boundary,
                          std::string_view subject = "archive");

std::string encode_quoted_printable(std::string_view bytes);

/// Decoders, exposed for testing. Offsets in thrown errors are relative to the
/// start of `encoded` plus `base_offset`.
std::string decode_quoted_printable(std::string_view encoded, std::size_t base_offset = 0);
std::string decode_base64(std::string_view encoded, std::size_t base_offset = 0);

}  // namespace gp::mhtml
