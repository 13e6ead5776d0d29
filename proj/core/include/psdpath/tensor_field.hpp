#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "psdpath/geodesic.hpp"
#include "psdpath/matrix.hpp"

namespace psdpath {

/// A regular 3-D grid of 3x3 PSD tensors, x-fastest voxel order.
struct TensorField {
  std::array<std::size_t, 3> dims{1, 1, 1};
  std::array<double, 3> spacing{1.0, 1.0, 1.0};
  std::vector<SymMatrix> tensors;

  std::size_t voxel_count() const noexcept { return dims[0] * dims[1] * dims[2]; }
  std::size_t index(std::size_t x, std::size_t y, std::size_t z) const noexcept {
    return x + dims[0] * (y + dims[1] * z);
  }
  const SymMatrix& at(std::size_t x, std::size_t y, std::size_t z) const {
    return tensors.at(index(x, y, z));
  }

  /// Throws ValidationError: non-positive dims or spacing, tensor count
  /// mismatch, non-3x3 or non-PSD tensors (listing the offending voxels).
  void validate() const;

  friend bool operator==(const TensorField&, const TensorField&) = default;
};

/// Six upper-triangular components xx, xy, xz, yy, yz, zz.
std::array<double, 6> to_components(const SymMatrix& t);
SymMatrix from_components(const std::array<double, 6>& c);

/// Schema: {"dims": [nx, ny, nz], "spacing": [sx, sy, sz], "tensors": [[6 reals], ...]}.
/// Throws ParseError (malformed) or ValidationError (inconsistent contents).
TensorField parse_field(std::string_view text);
std::string serialize_field(const TensorField& field);

TensorField load_field(const std::filesystem::path& path);
void save_field(const TensorField& field, const std::filesystem::path& path);

/// A single tensor is stored as the bare 6-real array.
SymMatrix parse_tensor(std::string_view text);
std::string serialize_tensor(const SymMatrix& t);
SymMatrix load_tensor(const std::filesystem::path& path);

/// One row per voxel: x, y, z, xx, xy, xz, yy, yz, zz.
std::string field_to_csv(const TensorField& field);

/// Inserts factor - 1 points between neighbouring voxels along x, then y,
/// then z. A new point at fraction t from voxel a towards voxel b is the path
/// point at p = 1 - t, so t = 0 gives a and t = 1 gives b. Original voxels are
/// copied unchanged. Path errors are rethrown naming the voxel pair.
TensorField upsample_field(const TensorField& field, MetricKind metric, std::size_t factor,
                           unsigned threads = 1);

/// Reads a whole file; throws ParseError if it cannot be opened.
std::string read_text_file(const std::filesystem::path& path);
/// Throws std::runtime_error if the file cannot be written.
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace psdpath
