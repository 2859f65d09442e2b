#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "cordscan/error.hpp"
#include "cordscan/io/csv.hpp"
#include "cordscan/io/labels.hpp"
#include "cordscan/io/nifti.hpp"
#include "cordscan/io/scheme.hpp"
#include "cordscan/io/volume.hpp"
#include "cordscan/rng.hpp"
#include "support.hpp"

using namespace cordscan;
using cordscan::testing::TempDir;

namespace {

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no cordscan::Error thrown";
  return ErrorCode::InvalidArgument;
}

io::Volume random_volume(std::array<std::size_t, 3> dims, std::size_t frames, std::uint64_t seed) {
  io::Geometry g = io::make_geometry(dims, {2.0, 1.5, 2.5});
  g.affine(0, 3) = -80.25;
  g.affine(1, 3) = 12.5;
  g.affine(2, 3) = 3.0;
  io::Volume v(g, frames);
  CounterRng rng(seed);
  // float32-representable values so the on-disk format is lossless.
  for (double& x : v.data()) x = static_cast<float>(rng.normal(100.0, 30.0));
  v.set_4d(frames > 1);
  return v;
}

/// Minimal little-endian NIfTI-1 header followed by raw data.
std::vector<char> raw_nifti(std::array<std::int16_t, 4> dims, std::int16_t datatype, std::int16_t bitpix,
                            const void* data, std::size_t bytes, float slope = 0.0f, float inter = 0.0f) {
  std::vector<char> buf(352 + bytes, 0);
  auto put = [&](std::size_t off, auto value) { std::memcpy(buf.data() + off, &value, sizeof(value)); };
  put(0, std::int32_t{348});
  const std::int16_t ndim = dims[3] > 1 ? 4 : 3;
  put(40, ndim);
  for (int i = 0; i < 4; ++i) put(42 + 2 * i, dims[static_cast<std::size_t>(i)]);
  for (int i = 4; i < 7; ++i) put(42 + 2 * i, std::int16_t{1});
  put(70, datatype);
  put(72, bitpix);
  put(76, 1.0f);
  for (int i = 1; i < 4; ++i) put(76 + 4 * i, 2.0f);
  put(108, 352.0f);
  put(112, slope);
  put(116, inter);
  std::memcpy(buf.data() + 344, "n+1\0", 4);
  std::memcpy(buf.data() + 352, data, bytes);
  return buf;
}

void write_bytes(const std::filesystem::path& p, const std::vector<char>& bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

}  // namespace

TEST(Volume, RejectsBadGeometry) {
  EXPECT_EQ(code_of([] { io::make_geometry({0, 2, 2}, {1, 1, 1}).validate(); }), ErrorCode::DimensionMismatch);
  EXPECT_EQ(code_of([] { io::make_geometry({2, 2, 2}, {1, -1, 1}).validate(); }), ErrorCode::DimensionMismatch);
  io::Geometry g = io::make_geometry({2, 2, 2}, {1, 1, 1});
  g.affine(3, 0) = 0.5;
  EXPECT_EQ(code_of([&] { g.validate(); }), ErrorCode::DimensionMismatch);
  EXPECT_EQ(code_of([] { io::Volume(io::make_geometry({2, 2, 2}, {1, 1, 1}), 1, std::vector<double>(7)); }),
            ErrorCode::DimensionMismatch);
}

TEST(Volume, IndexingIsXFastest) {
  const io::Geometry g = io::make_geometry({3, 4, 5}, {1, 1, 1});
  EXPECT_EQ(g.index(1, 2, 3), 1u + 3u * (2u + 4u * 3u));
  const auto c = g.coords(g.index(2, 3, 4));
  EXPECT_EQ(c, (std::array<std::size_t, 3>{2, 3, 4}));
}

TEST(Nifti, RoundTripIsBitExact) {
  TempDir dir;
  for (const char* name : {"v.nii", "v.nii.gz"}) {
    const io::Volume v = random_volume({7, 5, 3}, 1, 11);
    io::write_volume(v, dir / name);
    const io::Volume r = io::read_volume(dir / name);
    EXPECT_EQ(r.geometry().dims, v.geometry().dims);
    EXPECT_EQ(r.geometry().voxel_size, v.geometry().voxel_size);
    EXPECT_EQ(r.geometry().affine, v.geometry().affine);
    EXPECT_EQ(r.frames(), 1u);
    EXPECT_EQ(r.data(), v.data()) << name;
  }
}

TEST(Nifti, FourDimensionalRoundTrip) {
  TempDir dir;
  const io::Volume v = random_volume({4, 3, 2}, 6, 12);
  io::write_volume(v, dir / "dwi.nii.gz");
  const io::Volume r = io::read_volume(dir / "dwi.nii.gz");
  EXPECT_TRUE(r.is_4d());
  EXPECT_EQ(r.frames(), 6u);
  EXPECT_EQ(r.data(), v.data());
}

TEST(Nifti, GzipDetectedByMagicNotExtension) {
  TempDir dir;
  const io::Volume v = random_volume({3, 3, 3}, 1, 13);
  io::write_volume(v, dir / "v.nii.gz");
  std::filesystem::copy_file(dir / "v.nii.gz", dir / "plain_name.nii");
  EXPECT_EQ(io::read_volume(dir / "plain_name.nii").data(), v.data());
}

TEST(Nifti, WriteNarrowsToFloat32) {
  TempDir dir;
  io::Volume v(io::make_geometry({2, 1, 1}, {1, 1, 1}), 1, std::vector<double>{0.1, 1.0 / 3.0});
  io::write_volume(v, dir / "f.nii");
  const io::Volume r = io::read_volume(dir / "f.nii");
  EXPECT_EQ(r(0), static_cast<double>(0.1f));
  EXPECT_EQ(r(1), static_cast<double>(static_cast<float>(1.0 / 3.0)));
}

TEST(Nifti, ReadsIntegerTypesWithScaling) {
  TempDir dir;
  const std::uint8_t u8[4] = {0, 1, 2, 255};
  write_bytes(dir / "u8.nii", raw_nifti({2, 2, 1, 1}, 2, 8, u8, sizeof u8));
  EXPECT_EQ(io::read_volume(dir / "u8.nii").data(), (std::vector<double>{0, 1, 2, 255}));

  const std::int16_t i16[4] = {-3, 0, 7, 1000};
  write_bytes(dir / "i16.nii", raw_nifti({2, 2, 1, 1}, 4, 16, i16, sizeof i16, 0.5f, 10.0f));
  EXPECT_EQ(io::read_volume(dir / "i16.nii").data(), (std::vector<double>{8.5, 10, 13.5, 510}));

  const double f64[2] = {1e-300, -2.5};
  write_bytes(dir / "f64.nii", raw_nifti({2, 1, 1, 1}, 64, 64, f64, sizeof f64));
  const io::Volume r = io::read_volume(dir / "f64.nii");
  EXPECT_EQ(r(0), 1e-300);
  EXPECT_EQ(r(1), -2.5);
  EXPECT_EQ(r.geometry().voxel_size, (std::array<double, 3>{2, 2, 2}));
}

TEST(Nifti, ReadsBigEndian) {
  TempDir dir;
  const float values[2] = {1.5f, -4.0f};
  std::vector<char> bytes = raw_nifti({2, 1, 1, 1}, 16, 32, values, sizeof values);
  auto swap_field = [&](std::size_t off, std::size_t width) { std::reverse(bytes.begin() + off, bytes.begin() + off + width); };
  swap_field(0, 4);
  for (int i = 0; i < 8; ++i) swap_field(40 + 2 * i, 2);
  swap_field(70, 2);
  swap_field(72, 2);
  for (int i = 0; i < 8; ++i) swap_field(76 + 4 * i, 4);
  swap_field(108, 4);
  swap_field(112, 4);
  swap_field(116, 4);
  swap_field(352, 4);
  swap_field(356, 4);
  write_bytes(dir / "be.nii", bytes);
  EXPECT_EQ(io::read_volume(dir / "be.nii").data(), (std::vector<double>{1.5, -4.0}));
}

TEST(Nifti, Errors) {
  TempDir dir;
  const io::Volume v = random_volume({6, 6, 6}, 1, 14);
  io::write_volume(v, dir / "v.nii");
  std::vector<char> bytes(std::filesystem::file_size(dir / "v.nii"));
  std::ifstream(dir / "v.nii", std::ios::binary).read(bytes.data(), static_cast<std::streamsize>(bytes.size()));

  write_bytes(dir / "truncated.nii", std::vector<char>(bytes.begin(), bytes.begin() + 500));
  EXPECT_EQ(code_of([&] { io::read_volume(dir / "truncated.nii"); }), ErrorCode::CorruptHeader);
  write_bytes(dir / "short.nii", std::vector<char>(bytes.begin(), bytes.begin() + 100));
  EXPECT_EQ(code_of([&] { io::read_volume(dir / "short.nii"); }), ErrorCode::CorruptHeader);

  write_text(dir / "text.nii", std::string(400, 'x'));
  EXPECT_EQ(code_of([&] { io::read_volume(dir / "text.nii"); }), ErrorCode::UnsupportedFormat);

  const std::int32_t i32[1] = {5};
  write_bytes(dir / "i32.nii", raw_nifti({1, 1, 1, 1}, 8, 32, i32, sizeof i32));
  EXPECT_EQ(code_of([&] { io::read_volume(dir / "i32.nii"); }), ErrorCode::UnsupportedFormat);

  EXPECT_EQ(code_of([&] { io::read_volume(dir / "missing.nii"); }), ErrorCode::IoFailure);
  EXPECT_EQ(code_of([&] { io::write_volume(v, dir / "no" / "such" / "dir.nii"); }), ErrorCode::IoFailure);
}

TEST(Scheme, ReadsFslFilesAndAppliesB0Threshold) {
  TempDir dir;
  write_text(dir / "bval", "0 5 900 900\n");
  write_text(dir / "bvec", "0 0 2 0\n0 0 0 0.6\n0 0 0 0.8\n");
  const io::GradientScheme s = io::read_scheme(dir / "bval", dir / "bvec");
  ASSERT_EQ(s.size(), 4u);
  EXPECT_EQ(s.b0_count(), 2u);
  EXPECT_EQ(s[1].b, 0.0);
  EXPECT_EQ(s[0].g, Eigen::Vector3d::Zero());
  EXPECT_NEAR(s[2].g.x(), 1.0, 1e-15);
  EXPECT_NEAR(s[3].g.norm(), 1.0, 1e-15);
}

TEST(Scheme, AcceptsColumnLayout) {
  TempDir dir;
  write_text(dir / "bval", "0\n900\n900\n900\n");
  write_text(dir / "bvec", "0 0 0\n1 0 0\n0 1 0\n0 0 1\n");
  const io::GradientScheme s = io::read_scheme(dir / "bval", dir / "bvec");
  ASSERT_EQ(s.size(), 4u);
  EXPECT_EQ(s[2].g, Eigen::Vector3d::UnitY());
}

TEST(Scheme, Errors) {
  TempDir dir;
  std::string bval = "0";
  std::string bx = "0", by = "0", bz = "0";
  for (int i = 0; i < 35; ++i) {
    bval += " 900";
    bx += " 1";
    by += " 0";
    bz += " 0";
  }
  write_text(dir / "bval", bval + " 900\n");
  write_text(dir / "bvec", bx + "\n" + by + "\n" + bz + "\n");
  EXPECT_EQ(code_of([&] { io::read_scheme(dir / "bval", dir / "bvec"); }), ErrorCode::LengthMismatch);

  write_text(dir / "bval2", "0 nine\n");
  write_text(dir / "bvec2", "0 1\n0 0\n0 0\n");
  EXPECT_EQ(code_of([&] { io::read_scheme(dir / "bval2", dir / "bvec2"); }), ErrorCode::NonNumericToken);

  EXPECT_EQ(code_of([&] { io::read_scheme(dir / "nope", dir / "bvec2"); }), ErrorCode::IoFailure);
  EXPECT_EQ(code_of([] { io::GradientScheme({{900.0, Eigen::Vector3d::Zero()}}); }), ErrorCode::InvalidScheme);
  EXPECT_EQ(code_of([] { io::GradientScheme({{-1.0, Eigen::Vector3d::UnitX()}}); }), ErrorCode::InvalidScheme);
}

TEST(Scheme, FuzzedFilesAlwaysYieldUnitDirections) {
  TempDir dir;
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::uniform_int_distribution<int> b(0, 3);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 40;
    std::string bval, x, y, z;
    for (int i = 0; i < n; ++i) {
      const int kind = b(gen);
      bval += std::to_string(kind == 0 ? 0 : kind == 1 ? 7 : 900) + " ";
      x += std::to_string(u(gen)) + " ";
      y += std::to_string(u(gen)) + " ";
      z += std::to_string(u(gen)) + " ";
    }
    write_text(dir / "bval", bval + "\n");
    write_text(dir / "bvec", x + "\n" + y + "\n" + z + "\n");
    const io::GradientScheme s = io::read_scheme(dir / "bval", dir / "bvec");
    for (const auto& e : s.entries()) {
      if (e.b > 0.0) EXPECT_NEAR(e.g.norm(), 1.0, 1e-12);
      EXPECT_TRUE(e.b == 0.0 || e.b >= io::kB0Threshold);
    }
  }
}

TEST(Scheme, WriteReadRoundTrip) {
  TempDir dir;
  std::vector<io::GradientEntry> entries{{0.0, Eigen::Vector3d::Zero()},
                                         {900.0, Eigen::Vector3d(0.6, 0.0, 0.8)},
                                         {1000.0, Eigen::Vector3d(0.0, 1.0, 0.0)}};
  const io::GradientScheme s(entries);
  io::write_scheme(s, dir / "bval", dir / "bvec");
  const io::GradientScheme r = io::read_scheme(dir / "bval", dir / "bvec");
  ASSERT_EQ(r.size(), s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_EQ(r[i].b, s[i].b);
    EXPECT_NEAR((r[i].g - s[i].g).norm(), 0.0, 1e-15);
  }
}

TEST(Scheme, TensorRankAndRepeats) {
  std::vector<io::GradientEntry> coplanar{{0.0, Eigen::Vector3d::Zero()}};
  for (int i = 0; i < 6; ++i) {
    const double a = i * 0.5;
    coplanar.push_back({900.0, Eigen::Vector3d(std::cos(a), std::sin(a), 0.0)});
  }
  const io::GradientScheme s(coplanar);
  EXPECT_LT(s.tensor_rank(), 6);
  EXPECT_EQ(code_of([&] { s.require_tensor_fittable(); }), ErrorCode::RankDeficientDesign);
  EXPECT_EQ(s.repeated(3).size(), 21u);
}

TEST(Csv, RoundTripAndParsing) {
  TempDir dir;
  io::CsvTable t;
  t.header = {"a", "b"};
  t.rows = {{"x", io::format_number(0.1)}, {"y", io::format_number(std::nan(""))}};
  io::write_csv(t, dir / "t.csv");
  const io::CsvTable r = io::read_csv(dir / "t.csv");
  EXPECT_EQ(r.header, t.header);
  EXPECT_EQ(r.rows, t.rows);
  EXPECT_EQ(r.column("b"), 1u);
  EXPECT_FALSE(r.has_column("c"));
  EXPECT_EQ(code_of([&] { r.column("c"); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(io::parse_number(io::format_number(0.1)), 0.1);
  EXPECT_EQ(io::parse_number(io::format_number(1.0 / 3.0)), 1.0 / 3.0);
  EXPECT_EQ(code_of([] { io::parse_number("1.5x"); }), ErrorCode::NonNumericToken);

  write_text(dir / "ragged.csv", "a,b\n1\n");
  EXPECT_EQ(code_of([&] { io::read_csv(dir / "ragged.csv"); }), ErrorCode::LengthMismatch);
}

TEST(Labels, ValidatesGridsAndValues) {
  const io::Geometry g = io::make_geometry({3, 3, 3}, {2, 2, 2});
  io::LabelMap labels{io::Volume(g, 1, 2.0), io::Volume(g, 1, 0.5), std::nullopt};
  EXPECT_NO_THROW(labels.validate());
  labels.wm_weight(4) = 1.5;
  EXPECT_EQ(code_of([&] { labels.validate(); }), ErrorCode::InvalidArgument);
  labels.wm_weight(4) = 1.0;
  labels.levels(0) = 9;
  EXPECT_EQ(code_of([&] { labels.validate(); }), ErrorCode::InvalidArgument);
  labels.levels(0) = 1;
  labels.lesion = io::Volume(io::make_geometry({3, 3, 2}, {2, 2, 2}), 1);
  EXPECT_EQ(code_of([&] { labels.validate(); }), ErrorCode::DimensionMismatch);
  labels.lesion.reset();
  EXPECT_EQ(code_of([&] { labels.require_grid(io::make_geometry({3, 3, 3}, {1, 1, 1})); }),
            ErrorCode::DimensionMismatch);
}

TEST(Labels, ReadFromFiles) {
  TempDir dir;
  const io::Geometry g = io::make_geometry({2, 2, 2}, {2, 2, 2});
  io::Volume levels(g, 1, 3.0);
  io::Volume wm(g, 1, 0.25);
  io::write_volume(levels, dir / "levels.nii.gz");
  io::write_volume(wm, dir / "wm.nii.gz");
  const io::LabelMap m = io::read_label_map(dir / "levels.nii.gz", dir / "wm.nii.gz");
  EXPECT_FALSE(m.lesion.has_value());
  EXPECT_EQ(m.levels(7), 3.0);
  EXPECT_EQ(m.wm_weight(7), 0.25);
}
