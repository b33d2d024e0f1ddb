// SPDX-License-Identifier: Apache-2.0

#include <cctype>
#include <sstream>

#include "cidcassi/error.hpp"
#include "cidcassi/io.hpp"

namespace cidcassi {
namespace {

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string next_token(std::span<const std::uint8_t> b, std::size_t& pos) {
  while (pos < b.size()) {
    if (b[pos] == '#') {
      while (pos < b.size() && b[pos] != '\n') ++pos;
    } else if (std::isspace(b[pos])) {
      ++pos;
    } else {
      break;
    }
  }
  std::string tok;
  while (pos < b.size() && !std::isspace(b[pos]) && b[pos] != '#') tok.push_back(static_cast<char>(b[pos++]));
  return tok;
}

std::size_t parse_field(std::span<const std::uint8_t> b, std::size_t& pos, const char* name) {
  const std::size_t at = pos;
  const std::string tok = next_token(b, pos);
  if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos) {
    std::ostringstream msg;
    msg << "PGM: bad " << name << " near byte offset " << at;
    throw ParseError(msg.str());
  }
  return std::stoul(tok);
}

}  // namespace

CodedMask pgm_read_mask(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  const std::span<const std::uint8_t> b(bytes);
  std::size_t pos = 0;
  if (next_token(b, pos) != "P5") {
    throw ParseError(path.string() + ": PGM magic \"P5\" expected at byte offset 0");
  }
  const std::size_t width = parse_field(b, pos, "width");
  const std::size_t height = parse_field(b, pos, "height");
  const std::size_t maxval = parse_field(b, pos, "maxval");
  if (maxval == 0 || maxval > 255) {
    throw ParseError(path.string() + ": only 8-bit PGM (maxval 1..255) is supported");
  }
  ++pos;  // single whitespace byte before the raster
  const std::size_t need = width * height;
  if (bytes.size() < pos + need) {
    std::ostringstream msg;
    msg << path.string() << ": truncated raster: expected " << need << " bytes from offset "
        << pos << ", got " << (bytes.size() > pos ? bytes.size() - pos : 0);
    throw ParseError(msg.str());
  }
  CodedMask mask(height, width, 0.0);
  auto v = mask.values();
  for (std::size_t i = 0; i < need; ++i) v[i] = b[pos + i] > 0 ? 1.0 : 0.0;
  return mask;
}

void pgm_write_mask(const CodedMask& mask, const std::filesystem::path& path) {
  mask.validate();
  write_atomically(path, [&mask](std::ostream& out) {
    out << "P5\n" << mask.width() << ' ' << mask.height() << "\n255\n";
    for (double v : mask.values()) out.put(static_cast<char>(v > 0.0 ? 255 : 0));
  });
}

CodedMask mask_read(const std::filesystem::path& path) {
  if (path.extension() == ".pgm") return pgm_read_mask(path);
  CodedMask mask(plane_read(path));
  mask.validate();
  return mask;
}

}  // namespace cidcassi
