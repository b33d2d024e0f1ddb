// SPDX-License-Identifier: Apache-2.0

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "cidcassi/error.hpp"
#include "cidcassi/io.hpp"

namespace cidcassi {
namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int s = 0; s < 32; s += 8) out.push_back(static_cast<std::uint8_t>((v >> s) & 0xff));
}

std::uint16_t get_u16(std::span<const std::uint8_t> b, std::size_t off) {
  return static_cast<std::uint16_t>(b[off] | (b[off + 1] << 8));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t off) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[off + static_cast<std::size_t>(i)];
  return v;
}

std::uint32_t checked_dim(std::size_t v, const char* name) {
  if (v > 0xffffffffu) throw ShapeError(std::string("cube dimension too large: ") + name);
  return static_cast<std::uint32_t>(v);
}

}  // namespace

std::vector<std::uint8_t> encode_cube(const SpectralCube& cube) {
  std::vector<std::uint8_t> out;
  out.reserve(kCubeHeaderBytes + cube.size() * 4);
  out.insert(out.end(), kCubeMagic, kCubeMagic + 4);
  put_u16(out, kCubeVersion);
  put_u16(out, kDtypeFloat32);
  put_u32(out, checked_dim(cube.bands(), "bands"));
  put_u32(out, checked_dim(cube.height(), "height"));
  put_u32(out, checked_dim(cube.width(), "width"));
  for (double v : cube.values()) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  return out;
}

SpectralCube decode_cube(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kCubeHeaderBytes) {
    std::ostringstream msg;
    msg << "cube header truncated: need " << kCubeHeaderBytes << " bytes, file has "
        << bytes.size();
    throw ParseError(msg.str());
  }
  if (std::memcmp(bytes.data(), kCubeMagic, 4) != 0) {
    throw ParseError("bad magic at byte offset 0: expected \"CIDC\"");
  }
  const std::uint16_t version = get_u16(bytes, 4);
  if (version != kCubeVersion) {
    std::ostringstream msg;
    msg << "unsupported version " << version << " at byte offset 4 (expected " << kCubeVersion
        << ")";
    throw ParseError(msg.str());
  }
  const std::uint16_t dtype = get_u16(bytes, 6);
  if (dtype != kDtypeFloat32) {
    std::ostringstream msg;
    msg << "unsupported dtype code " << dtype << " at byte offset 6 (expected 1 = float32)";
    throw ParseError(msg.str());
  }
  const std::size_t bands = get_u32(bytes, 8);
  const std::size_t height = get_u32(bytes, 12);
  const std::size_t width = get_u32(bytes, 16);
  // Header dims come from untrusted input; reject products that cannot fit.
  std::size_t declared = 0;
  const bool overflow = __builtin_mul_overflow(bands, height, &declared) ||
                        __builtin_mul_overflow(declared, width, &declared) ||
                        __builtin_mul_overflow(declared, std::size_t{4}, &declared);
  if (overflow || declared > bytes.size()) {
    std::ostringstream msg;
    msg << "truncated payload: header at byte offset 8 declares " << bands << "x" << height
        << "x" << width << " float32, file has " << bytes.size() << " bytes";
    throw ParseError(msg.str());
  }
  const std::size_t count = bands * height * width;
  const std::size_t expected = kCubeHeaderBytes + count * 4;
  if (bytes.size() != expected) {
    std::ostringstream msg;
    msg << (bytes.size() < expected ? "truncated payload" : "trailing bytes after payload")
        << ": expected " << expected << " bytes (" << bands << "x" << height << "x" << width
        << " float32 from byte offset " << kCubeHeaderBytes << "), got " << bytes.size();
    throw ParseError(msg.str());
  }
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t off = kCubeHeaderBytes + 4 * i;
    const float f = std::bit_cast<float>(get_u32(bytes, off));
    if (!std::isfinite(f)) {
      std::ostringstream msg;
      msg << "non-finite value at byte offset " << off;
      throw ParseError(msg.str());
    }
    values[i] = static_cast<double>(f);
  }
  return SpectralCube(height, width, bands, std::move(values));
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

SpectralCube cube_read(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return decode_cube(bytes);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void cube_write(const SpectralCube& cube, const std::filesystem::path& path) {
  const auto bytes = encode_cube(cube);
  write_atomically(path, [&bytes](std::ostream& out) {
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
  });
}

SpectralCube plane_as_cube(const Plane& plane) {
  const auto v = plane.values();
  return SpectralCube(plane.height(), plane.width(), 1, std::vector<double>(v.begin(), v.end()));
}

Plane plane_read(const std::filesystem::path& path) {
  SpectralCube cube = cube_read(path);
  if (cube.bands() != 1) {
    std::ostringstream msg;
    msg << path.string() << ": expected a single-band file, found " << cube.bands() << " bands";
    throw ParseError(msg.str());
  }
  const auto v = cube.values();
  return Plane(cube.height(), cube.width(), std::vector<double>(v.begin(), v.end()));
}

void plane_write(const Plane& plane, const std::filesystem::path& path) {
  cube_write(plane_as_cube(plane), path);
}

}  // namespace cidcassi
