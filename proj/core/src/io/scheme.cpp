#include "cordscan/io/scheme.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "cordscan/error.hpp"

namespace cordscan::io {
namespace {

using Rows = std::vector<std::vector<double>>;

Rows read_numeric_rows(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  Rows rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream tokens(line);
    std::vector<double> row;
    std::string tok;
    while (tokens >> tok) {
      double value = 0.0;
      const char* first = tok.data();
      const char* last = tok.data() + tok.size();
      if (*first == '+') ++first;
      auto [ptr, ec] = std::from_chars(first, last, value);
      if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
        throw Error(ErrorCode::NonNumericToken,
                    path.string() + ":" + std::to_string(line_no) + ": '" + tok + "' is not a number");
      }
      row.push_back(value);
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

GradientScheme::GradientScheme(std::vector<GradientEntry> entries) : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    GradientEntry& e = entries_[i];
    if (!std::isfinite(e.b) || e.b < 0.0) {
      throw Error(ErrorCode::InvalidScheme, "entry " + std::to_string(i) + " has invalid b-value");
    }
    if (!e.g.allFinite()) throw Error(ErrorCode::InvalidScheme, "entry " + std::to_string(i) + " has invalid direction");
    if (e.b < kB0Threshold) e.b = 0.0;
    const double norm = e.g.norm();
    if (e.b > 0.0) {
      if (norm < 1e-6) {
        throw Error(ErrorCode::InvalidScheme, "weighted entry " + std::to_string(i) + " has zero direction");
      }
      e.g /= norm;
    } else if (norm > 0.0) {
      e.g /= norm;
    }
  }
}

std::size_t GradientScheme::b0_count() const noexcept {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.b == 0.0 ? 1 : 0;
  return n;
}

int GradientScheme::tensor_rank() const {
  std::vector<Eigen::Matrix<double, 1, 6>> rows;
  for (const auto& e : entries_) {
    if (e.b == 0.0) continue;
    const Eigen::Vector3d& g = e.g;
    rows.push_back((Eigen::Matrix<double, 1, 6>() << g.x() * g.x(), g.y() * g.y(), g.z() * g.z(),
                    2 * g.x() * g.y(), 2 * g.x() * g.z(), 2 * g.y() * g.z())
                       .finished());
  }
  if (rows.empty()) return 0;
  Eigen::MatrixXd design(static_cast<Eigen::Index>(rows.size()), 6);
  for (std::size_t i = 0; i < rows.size(); ++i) design.row(static_cast<Eigen::Index>(i)) = rows[i];
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-8);
  return static_cast<int>(qr.rank());
}

void GradientScheme::require_tensor_fittable() const {
  if (b0_count() == 0) throw Error(ErrorCode::InvalidScheme, "scheme has no b = 0 measurement");
  if (tensor_rank() < 6) {
    throw Error(ErrorCode::RankDeficientDesign, "gradient directions do not span the tensor space");
  }
}

GradientScheme GradientScheme::repeated(std::size_t repeats) const {
  std::vector<GradientEntry> out;
  out.reserve(entries_.size() * repeats);
  for (std::size_t r = 0; r < repeats; ++r) out.insert(out.end(), entries_.begin(), entries_.end());
  return GradientScheme(std::move(out));
}

GradientScheme read_scheme(const std::filesystem::path& bval_path, const std::filesystem::path& bvec_path) {
  const Rows bval_rows = read_numeric_rows(bval_path);
  std::vector<double> bvals;
  for (const auto& row : bval_rows) bvals.insert(bvals.end(), row.begin(), row.end());

  const Rows bvec_rows = read_numeric_rows(bvec_path);
  const std::size_t n = bvals.size();
  std::vector<GradientEntry> entries(n);

  const bool three_rows = bvec_rows.size() == 3 && bvec_rows[0].size() == n && bvec_rows[1].size() == n &&
                          bvec_rows[2].size() == n;
  bool n_by_three = !three_rows && bvec_rows.size() == n;
  if (n_by_three) {
    for (const auto& row : bvec_rows) n_by_three = n_by_three && row.size() == 3;
  }
  if (!three_rows && !n_by_three) {
    std::size_t bvec_count = bvec_rows.empty() ? 0 : bvec_rows[0].size();
    throw Error(ErrorCode::LengthMismatch, bval_path.string() + " has " + std::to_string(n) + " entries but " +
                                               bvec_path.string() + " describes " + std::to_string(bvec_count));
  }

  for (std::size_t i = 0; i < n; ++i) {
    entries[i].b = bvals[i];
    for (int c = 0; c < 3; ++c) {
      entries[i].g[c] = three_rows ? bvec_rows[static_cast<std::size_t>(c)][i] : bvec_rows[i][static_cast<std::size_t>(c)];
    }
  }
  return GradientScheme(std::move(entries));
}

void write_scheme(const GradientScheme& scheme, const std::filesystem::path& bval_path,
                  const std::filesystem::path& bvec_path) {
  std::ofstream bval(bval_path);
  std::ofstream bvec(bvec_path);
  if (!bval || !bvec) throw Error(ErrorCode::IoFailure, "cannot write gradient files next to " + bval_path.string());
  for (std::size_t i = 0; i < scheme.size(); ++i) {
    bval << (i ? " " : "") << scheme[i].b;
  }
  bval << '\n';
  bvec << std::setprecision(17);
  for (int c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < scheme.size(); ++i) bvec << (i ? " " : "") << scheme[i].g[c];
    bvec << '\n';
  }
  if (!bval || !bvec) throw Error(ErrorCode::IoFailure, "write failed for " + bval_path.string());
}

}  // namespace cordscan::io
