#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include <Eigen/Core>

namespace cordscan::io {

/// b-values below this (s/mm^2) are treated as non-diffusion-weighted.
inline constexpr double kB0Threshold = 10.0;

struct GradientEntry {
  double b = 0.0;                                  // s/mm^2
  Eigen::Vector3d g = Eigen::Vector3d::Zero();     // unit for b > 0
};

/// Per-measurement b-value and direction table, one entry per DWI frame.
class GradientScheme {
public:
  GradientScheme() = default;

  /// Validates and normalizes: b < kB0Threshold becomes 0, directions of
  /// weighted entries are renormalized. Throws InvalidScheme for negative or
  /// non-finite b, or a zero direction on a weighted entry.
  explicit GradientScheme(std::vector<GradientEntry> entries);

  std::size_t size() const noexcept { return entries_.size(); }
  const GradientEntry& operator[](std::size_t i) const noexcept { return entries_[i]; }
  const std::vector<GradientEntry>& entries() const noexcept { return entries_; }

  bool is_b0(std::size_t i) const noexcept { return entries_[i].b == 0.0; }
  std::size_t b0_count() const noexcept;

  /// Rank of the 6-column quadratic design over weighted entries; 6 means the
  /// directions determine a full symmetric tensor.
  int tensor_rank() const;

  /// Throws InvalidScheme without a b = 0 entry and RankDeficientDesign when
  /// tensor_rank() < 6.
  void require_tensor_fittable() const;

  /// Concatenation of `repeats` copies of this scheme.
  GradientScheme repeated(std::size_t repeats) const;

private:
  std::vector<GradientEntry> entries_;
};

/// FSL-convention text files: bval holds one whitespace-separated row of
/// b-values, bvec three rows of x, y, z components. An N x 3 bvec layout is
/// also accepted (a 3 x 3 file is read as FSL rows). Throws LengthMismatch,
/// NonNumericToken or IoFailure.
GradientScheme read_scheme(const std::filesystem::path& bval_path, const std::filesystem::path& bvec_path);

void write_scheme(const GradientScheme& scheme, const std::filesystem::path& bval_path,
                  const std::filesystem::path& bvec_path);

}  // namespace cordscan::io
