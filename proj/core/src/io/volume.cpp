#include "cordscan/io/volume.hpp"

#include <string>

#include "cordscan/error.hpp"

namespace cordscan::io {

void Geometry::validate() const {
  for (std::size_t d : dims) {
    if (d == 0) throw Error(ErrorCode::DimensionMismatch, "volume dimension is zero");
  }
  for (double s : voxel_size) {
    if (!(s > 0.0)) throw Error(ErrorCode::DimensionMismatch, "voxel size must be positive");
  }
  if (affine(3, 0) != 0.0 || affine(3, 1) != 0.0 || affine(3, 2) != 0.0 || affine(3, 3) != 1.0) {
    throw Error(ErrorCode::DimensionMismatch, "affine last row must be (0, 0, 0, 1)");
  }
}

Geometry make_geometry(std::array<std::size_t, 3> dims, std::array<double, 3> voxel_size) {
  Geometry g;
  g.dims = dims;
  g.voxel_size = voxel_size;
  g.affine.setIdentity();
  for (int i = 0; i < 3; ++i) g.affine(i, i) = voxel_size[static_cast<std::size_t>(i)];
  return g;
}

Volume::Volume(Geometry geometry, std::size_t frames, double fill)
    : geometry_(std::move(geometry)),
      frames_(frames),
      four_d_(frames > 1),
      data_(geometry_.voxel_count() * frames, fill) {
  geometry_.validate();
  if (frames == 0) throw Error(ErrorCode::DimensionMismatch, "volume needs at least one frame");
}

Volume::Volume(Geometry geometry, std::size_t frames, std::vector<double> data)
    : geometry_(std::move(geometry)), frames_(frames), four_d_(frames > 1), data_(std::move(data)) {
  geometry_.validate();
  if (frames == 0) throw Error(ErrorCode::DimensionMismatch, "volume needs at least one frame");
  if (data_.size() != geometry_.voxel_count() * frames_) {
    throw Error(ErrorCode::DimensionMismatch,
                "data length " + std::to_string(data_.size()) + " does not match dims (" +
                    std::to_string(geometry_.voxel_count() * frames_) + " expected)");
  }
}

void Volume::series(std::size_t voxel, Eigen::VectorXd& out) const {
  out.resize(static_cast<Eigen::Index>(frames_));
  const std::size_t stride = geometry_.voxel_count();
  for (std::size_t t = 0; t < frames_; ++t) out[static_cast<Eigen::Index>(t)] = data_[voxel + stride * t];
}

Volume Volume::frame(std::size_t t) const {
  const std::size_t n = geometry_.voxel_count();
  std::vector<double> values(data_.begin() + static_cast<std::ptrdiff_t>(n * t),
                             data_.begin() + static_cast<std::ptrdiff_t>(n * (t + 1)));
  return Volume(geometry_, 1, std::move(values));
}

}  // namespace cordscan::io
