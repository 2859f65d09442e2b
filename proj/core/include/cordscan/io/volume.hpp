#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace cordscan::io {

/// Spatial sampling grid shared by every map of a subject.
struct Geometry {
  std::array<std::size_t, 3> dims{1, 1, 1};
  std::array<double, 3> voxel_size{1.0, 1.0, 1.0};  // mm
  Eigen::Matrix4d affine = Eigen::Matrix4d::Identity();  // voxel -> world (mm)

  std::size_t voxel_count() const noexcept { return dims[0] * dims[1] * dims[2]; }

  std::size_t index(std::size_t x, std::size_t y, std::size_t z) const noexcept {
    return x + dims[0] * (y + dims[1] * z);
  }

  std::array<std::size_t, 3> coords(std::size_t index) const noexcept {
    return {index % dims[0], (index / dims[0]) % dims[1], index / (dims[0] * dims[1])};
  }

  /// Throws DimensionMismatch unless dims > 0, voxel sizes > 0 and the
  /// affine's last row is (0, 0, 0, 1).
  void validate() const;

  /// Grid plus affine compared exactly; voxel_size follows from them.
  bool operator==(const Geometry& other) const noexcept {
    return dims == other.dims && voxel_size == other.voxel_size && affine == other.affine;
  }
};

/// Geometry with a diagonal voxel->world affine.
Geometry make_geometry(std::array<std::size_t, 3> dims, std::array<double, 3> voxel_size);

/// A 3D map or a 4D stack of 3D maps (4th index = measurement).
///
/// Storage is x-fastest: value(x, y, z, t) = data[x + nx*(y + ny*(z + nz*t))],
/// the same order NIfTI uses on disk.
class Volume {
public:
  Volume() = default;
  Volume(Geometry geometry, std::size_t frames, double fill = 0.0);
  Volume(Geometry geometry, std::size_t frames, std::vector<double> data);

  const Geometry& geometry() const noexcept { return geometry_; }
  std::size_t frames() const noexcept { return frames_; }
  bool is_4d() const noexcept { return four_d_; }
  void set_4d(bool four_d) noexcept { four_d_ = four_d || frames_ > 1; }

  std::size_t voxel_count() const noexcept { return geometry_.voxel_count(); }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator()(std::size_t voxel, std::size_t frame = 0) noexcept {
    return data_[voxel + geometry_.voxel_count() * frame];
  }
  double operator()(std::size_t voxel, std::size_t frame = 0) const noexcept {
    return data_[voxel + geometry_.voxel_count() * frame];
  }

  std::vector<double>& data() noexcept { return data_; }
  const std::vector<double>& data() const noexcept { return data_; }

  /// Copies the frame series of one voxel into out (resized to frames()).
  void series(std::size_t voxel, Eigen::VectorXd& out) const;

  /// Single-frame view of frame t as its own 3D volume.
  Volume frame(std::size_t t) const;

private:
  Geometry geometry_;
  std::size_t frames_ = 1;
  bool four_d_ = false;
  std::vector<double> data_;
};

}  // namespace cordscan::io
