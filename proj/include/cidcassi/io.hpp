// SPDX-License-Identifier: Apache-2.0
#pragma once

// File formats.
//
// Cube file ("CIDC"), all fields little-endian:
//
//   offset  size  field
//   0       4     magic "CIDC"
//   4       2     version (u16) = 1
//   6       2     dtype (u16), 1 = float32
//   8       4     bands  (u32)
//   12      4     height (u32)
//   16      4     width  (u32)
//   20      ...   payload: bands*height*width float32, band-major
//                 (band slowest, then row, then column)
//
// 2-D planes (intensity, masks, measurements) are cubes with one band.
// Values are held in double in memory and narrowed to float32 on write.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cidcassi/cube.hpp"

namespace cidcassi {

inline constexpr char kCubeMagic[4] = {'C', 'I', 'D', 'C'};
inline constexpr std::uint16_t kCubeVersion = 1;
inline constexpr std::uint16_t kDtypeFloat32 = 1;
inline constexpr std::size_t kCubeHeaderBytes = 20;

/// Serialises to the exact on-disk byte sequence.
std::vector<std::uint8_t> encode_cube(const SpectralCube& cube);
/// Parses a byte buffer; ParseError messages carry the byte offset.
SpectralCube decode_cube(std::span<const std::uint8_t> bytes);

SpectralCube cube_read(const std::filesystem::path& path);
void cube_write(const SpectralCube& cube, const std::filesystem::path& path);

Plane plane_read(const std::filesystem::path& path);
void plane_write(const Plane& plane, const std::filesystem::path& path);

SpectralCube plane_as_cube(const Plane& plane);

/// Binary PGM (P5, maxval <= 255). Any value > 0 maps to 1.0.
CodedMask pgm_read_mask(const std::filesystem::path& path);
void pgm_write_mask(const CodedMask& mask, const std::filesystem::path& path);

/// Loads a mask from PGM (by .pgm extension) or from a one-band cube file
/// (graded masks).
CodedMask mask_read(const std::filesystem::path& path);

/// Writes through a sibling temporary file and renames it into place, so a
/// reader never observes a partial file.
void write_atomically(const std::filesystem::path& path,
                      const std::function<void(std::ostream&)>& writer);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

/// Shortest round-trip decimal representation (inf/-inf/nan spelled out).
std::string format_number(double value);

}  // namespace cidcassi
