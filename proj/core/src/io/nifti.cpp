#include "cordscan/io/nifti.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <zlib.h>

#include "cordscan/error.hpp"

namespace cordscan::io {
namespace {

constexpr std::int32_t kHeaderSize = 348;
constexpr std::size_t kDataOffset = 352;

enum Datatype : std::int16_t {
  kUint8 = 2,
  kInt16 = 4,
  kFloat32 = 16,
  kFloat64 = 64,
};

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return bytes;
}

std::vector<unsigned char> gunzip(const std::vector<unsigned char>& packed, const std::filesystem::path& path) {
  z_stream zs{};
  if (inflateInit2(&zs, MAX_WBITS + 32) != Z_OK) {
    throw Error(ErrorCode::IoFailure, "zlib initialisation failed");
  }
  std::vector<unsigned char> out;
  out.reserve(packed.size() * 4);
  zs.next_in = const_cast<Bytef*>(packed.data());
  zs.avail_in = static_cast<uInt>(packed.size());
  unsigned char chunk[1 << 16];
  int rc = Z_OK;
  while (true) {
    zs.next_out = chunk;
    zs.avail_out = sizeof(chunk);
    rc = inflate(&zs, Z_NO_FLUSH);
    out.insert(out.end(), chunk, chunk + (sizeof(chunk) - zs.avail_out));
    if (rc == Z_STREAM_END) {
      // concatenated gzip members
      if (zs.avail_in > 0) {
        inflateReset(&zs);
        continue;
      }
      break;
    }
    if (rc != Z_OK) break;
    if (zs.avail_in == 0 && zs.avail_out != 0) break;
  }
  inflateEnd(&zs);
  if (rc != Z_STREAM_END) {
    // A truncated stream still yields whatever was decoded; the header and
    // size checks downstream decide whether that is enough.
    if (out.size() < static_cast<std::size_t>(kHeaderSize)) {
      throw Error(ErrorCode::CorruptHeader, "truncated gzip stream in " + path.string());
    }
  }
  return out;
}

class HeaderView {
public:
  HeaderView(const std::vector<unsigned char>& bytes, bool swap) : bytes_(bytes), swap_(swap) {}

  template <typename T>
  T get(std::size_t offset) const {
    T value;
    std::memcpy(&value, bytes_.data() + offset, sizeof(T));
    if (swap_) value = byteswap(value);
    return value;
  }

  template <typename T>
  static T byteswap(T value) {
    unsigned char raw[sizeof(T)];
    std::memcpy(raw, &value, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(raw[i], raw[sizeof(T) - 1 - i]);
    std::memcpy(&value, raw, sizeof(T));
    return value;
  }

private:
  const std::vector<unsigned char>& bytes_;
  bool swap_;
};

Eigen::Matrix4d quaternion_affine(const HeaderView& h, const std::array<double, 3>& pixdim) {
  const double b = h.get<float>(256);
  const double c = h.get<float>(260);
  const double d = h.get<float>(264);
  const double a = std::sqrt(std::max(0.0, 1.0 - (b * b + c * c + d * d)));
  double qfac = h.get<float>(76);
  if (qfac == 0.0) qfac = 1.0;
  Eigen::Matrix3d r;
  r << a * a + b * b - c * c - d * d, 2 * (b * c - a * d), 2 * (b * d + a * c),
      2 * (b * c + a * d), a * a + c * c - b * b - d * d, 2 * (c * d - a * b),
      2 * (b * d - a * c), 2 * (c * d + a * b), a * a + d * d - c * c - b * b;
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = r * Eigen::Vector3d(pixdim[0], pixdim[1], qfac * pixdim[2]).asDiagonal();
  m(0, 3) = h.get<float>(268);
  m(1, 3) = h.get<float>(272);
  m(2, 3) = h.get<float>(276);
  return m;
}

template <typename T>
void decode(const unsigned char* src, std::size_t count, bool swap, double slope, double inter,
            std::vector<double>& out) {
  out.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    T v;
    std::memcpy(&v, src + i * sizeof(T), sizeof(T));
    if (swap) v = HeaderView::byteswap(v);
    out[i] = static_cast<double>(v) * slope + inter;
  }
}

template <typename T>
void put(std::vector<unsigned char>& buf, std::size_t offset, T value) {
  std::memcpy(buf.data() + offset, &value, sizeof(T));
}

/// Rotation + qfac decomposition of the affine's linear part for the qform.
void encode_qform(const Eigen::Matrix4d& affine, std::vector<unsigned char>& buf) {
  Eigen::Matrix3d m = affine.topLeftCorner<3, 3>();
  Eigen::Vector3d scale = m.colwise().norm();
  for (int i = 0; i < 3; ++i) {
    if (scale[i] == 0.0) scale[i] = 1.0;
  }
  Eigen::Matrix3d r = m * scale.cwiseInverse().asDiagonal();
  // Nearest orthonormal matrix.
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  r = svd.matrixU() * svd.matrixV().transpose();
  float qfac = 1.0f;
  if (r.determinant() < 0.0) {
    qfac = -1.0f;
    r.col(2) = -r.col(2);
  }
  Eigen::Quaterniond q(r);
  q.normalize();
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  put<float>(buf, 76, qfac);
  put<float>(buf, 256, static_cast<float>(q.x()));
  put<float>(buf, 260, static_cast<float>(q.y()));
  put<float>(buf, 264, static_cast<float>(q.z()));
  put<float>(buf, 268, static_cast<float>(affine(0, 3)));
  put<float>(buf, 272, static_cast<float>(affine(1, 3)));
  put<float>(buf, 276, static_cast<float>(affine(2, 3)));
}

}  // namespace

Volume read_volume(const std::filesystem::path& path) {
  std::vector<unsigned char> bytes = read_file(path);
  if (bytes.size() >= 2 && bytes[0] == 0x1f && bytes[1] == 0x8b) bytes = gunzip(bytes, path);
  if (bytes.size() < static_cast<std::size_t>(kHeaderSize)) {
    throw Error(ErrorCode::CorruptHeader, path.string() + " is shorter than a NIfTI-1 header");
  }

  std::int32_t sizeof_hdr;
  std::memcpy(&sizeof_hdr, bytes.data(), sizeof(sizeof_hdr));
  bool swap = false;
  if (sizeof_hdr != kHeaderSize) {
    if (HeaderView::byteswap(sizeof_hdr) == kHeaderSize) {
      swap = true;
    } else if (sizeof_hdr == 540 || HeaderView::byteswap(sizeof_hdr) == 540) {
      throw Error(ErrorCode::UnsupportedFormat, path.string() + " is NIfTI-2");
    } else {
      throw Error(ErrorCode::UnsupportedFormat, path.string() + " is not a NIfTI-1 file");
    }
  }
  if (std::memcmp(bytes.data() + 344, "n+1\0", 4) != 0) {
    if (std::memcmp(bytes.data() + 344, "ni1\0", 4) == 0) {
      throw Error(ErrorCode::UnsupportedFormat, path.string() + ": two-file NIfTI (.hdr/.img) is not supported");
    }
    throw Error(ErrorCode::UnsupportedFormat, path.string() + ": missing NIfTI-1 magic");
  }
  const HeaderView h(bytes, swap);

  const int ndim = h.get<std::int16_t>(40);
  if (ndim < 1 || ndim > 7) throw Error(ErrorCode::CorruptHeader, path.string() + ": dim[0] out of range");
  std::array<std::size_t, 7> dim{1, 1, 1, 1, 1, 1, 1};
  for (int i = 0; i < ndim; ++i) {
    const int d = h.get<std::int16_t>(42 + 2 * static_cast<std::size_t>(i));
    if (d <= 0) throw Error(ErrorCode::CorruptHeader, path.string() + ": non-positive dimension");
    dim[static_cast<std::size_t>(i)] = static_cast<std::size_t>(d);
  }
  for (std::size_t i = 4; i < 7; ++i) {
    if (dim[i] != 1) throw Error(ErrorCode::UnsupportedFormat, path.string() + ": more than 4 dimensions");
  }

  const auto datatype = h.get<std::int16_t>(70);
  std::size_t bytes_per_voxel = 0;
  switch (datatype) {
    case kUint8: bytes_per_voxel = 1; break;
    case kInt16: bytes_per_voxel = 2; break;
    case kFloat32: bytes_per_voxel = 4; break;
    case kFloat64: bytes_per_voxel = 8; break;
    default:
      throw Error(ErrorCode::UnsupportedFormat,
                  path.string() + ": unsupported datatype " + std::to_string(datatype));
  }

  Geometry g;
  g.dims = {dim[0], dim[1], dim[2]};
  for (std::size_t i = 0; i < 3; ++i) {
    double p = std::fabs(static_cast<double>(h.get<float>(80 + 4 * i)));
    if (!(p > 0.0) || !std::isfinite(p)) p = 1.0;
    g.voxel_size[i] = p;
  }

  const auto sform_code = h.get<std::int16_t>(254);
  const auto qform_code = h.get<std::int16_t>(252);
  if (sform_code > 0) {
    g.affine.setIdentity();
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 4; ++c) {
        g.affine(r, c) = h.get<float>(280 + 16 * static_cast<std::size_t>(r) + 4 * static_cast<std::size_t>(c));
      }
    }
  } else if (qform_code > 0) {
    g.affine = quaternion_affine(h, g.voxel_size);
  } else {
    g.affine.setIdentity();
    for (int i = 0; i < 3; ++i) g.affine(i, i) = g.voxel_size[static_cast<std::size_t>(i)];
  }

  const float vox_offset = h.get<float>(108);
  if (!(vox_offset >= static_cast<float>(kHeaderSize)) || !std::isfinite(vox_offset)) {
    throw Error(ErrorCode::CorruptHeader, path.string() + ": invalid vox_offset");
  }
  const std::size_t offset = static_cast<std::size_t>(vox_offset);
  const std::size_t frames = dim[3];
  const std::size_t count = g.voxel_count() * frames;
  if (bytes.size() < offset + count * bytes_per_voxel) {
    throw Error(ErrorCode::CorruptHeader, path.string() + ": file is truncated (" + std::to_string(bytes.size()) +
                                              " bytes, " + std::to_string(offset + count * bytes_per_voxel) +
                                              " expected)");
  }

  double slope = h.get<float>(112);
  double inter = h.get<float>(116);
  if (slope == 0.0 || !std::isfinite(slope)) {
    slope = 1.0;
    inter = 0.0;
  }
  if (!std::isfinite(inter)) inter = 0.0;

  std::vector<double> data;
  const unsigned char* src = bytes.data() + offset;
  switch (datatype) {
    case kUint8: decode<std::uint8_t>(src, count, false, slope, inter, data); break;
    case kInt16: decode<std::int16_t>(src, count, swap, slope, inter, data); break;
    case kFloat32: decode<float>(src, count, swap, slope, inter, data); break;
    case kFloat64: decode<double>(src, count, swap, slope, inter, data); break;
    default: break;
  }

  Volume v(std::move(g), frames, std::move(data));
  v.set_4d(ndim >= 4);
  return v;
}

void write_volume(const Volume& v, const std::filesystem::path& path) {
  const Geometry& g = v.geometry();
  g.validate();
  if (v.size() != g.voxel_count() * v.frames()) {
    throw Error(ErrorCode::DimensionMismatch, "volume data length does not match dims");
  }
  for (std::size_t d : g.dims) {
    if (d > 32767) throw Error(ErrorCode::IoFailure, "dimension exceeds NIfTI-1 limit");
  }
  if (v.frames() > 32767) throw Error(ErrorCode::IoFailure, "frame count exceeds NIfTI-1 limit");

  std::vector<unsigned char> buf(kDataOffset + v.size() * sizeof(float), 0);
  put<std::int32_t>(buf, 0, kHeaderSize);
  buf[38] = 'r';  // regular
  const bool four_d = v.is_4d();
  put<std::int16_t>(buf, 40, four_d ? 4 : 3);
  for (std::size_t i = 0; i < 3; ++i) put<std::int16_t>(buf, 42 + 2 * i, static_cast<std::int16_t>(g.dims[i]));
  put<std::int16_t>(buf, 48, static_cast<std::int16_t>(v.frames()));
  for (std::size_t i = 4; i < 7; ++i) put<std::int16_t>(buf, 42 + 2 * i, 1);
  put<std::int16_t>(buf, 70, kFloat32);
  put<std::int16_t>(buf, 72, 32);
  put<float>(buf, 76, 1.0f);
  for (std::size_t i = 0; i < 3; ++i) put<float>(buf, 80 + 4 * i, static_cast<float>(g.voxel_size[i]));
  put<float>(buf, 92, 1.0f);
  put<float>(buf, 108, static_cast<float>(kDataOffset));
  put<float>(buf, 112, 1.0f);
  put<float>(buf, 116, 0.0f);
  buf[123] = 2 | 8;  // mm, seconds
  const char descrip[] = "cordscan";
  std::memcpy(buf.data() + 148, descrip, sizeof(descrip));
  put<std::int16_t>(buf, 252, 1);
  put<std::int16_t>(buf, 254, 1);
  encode_qform(g.affine, buf);
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < 4; ++c) {
      put<float>(buf, 280 + 16 * r + 4 * c,
                 static_cast<float>(g.affine(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))));
    }
  }
  std::memcpy(buf.data() + 344, "n+1\0", 4);

  unsigned char* dst = buf.data() + kDataOffset;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const float f = static_cast<float>(v.data()[i]);
    std::memcpy(dst + i * sizeof(float), &f, sizeof(float));
  }

  const std::string name = path.filename().string();
  const bool gz = name.size() > 3 && name.compare(name.size() - 3, 3, ".gz") == 0;
  if (gz) {
    gzFile out = gzopen(path.c_str(), "wb6");
    if (out == nullptr) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
    std::size_t written = 0;
    while (written < buf.size()) {
      const auto block = static_cast<unsigned>(std::min<std::size_t>(buf.size() - written, 1u << 30));
      if (gzwrite(out, buf.data() + written, block) != static_cast<int>(block)) {
        gzclose(out);
        throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
      }
      written += block;
    }
    if (gzclose(out) != Z_OK) throw Error(ErrorCode::IoFailure, "close failed for " + path.string());
  } else {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
  }
}

}  // namespace cordscan::io
