#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "cordscan/error.hpp"

namespace cordscan::cli {
namespace {

constexpr double kWidth = 760.0;
constexpr double kHeight = 460.0;
constexpr double kLeft = 60.0;
constexpr double kRight = 220.0;  // legend column
constexpr double kTop = 20.0;
constexpr double kBottom = 50.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2",
                                "#17becf", "#7f7f7f", "#bcbd22", "#393b79", "#637939", "#843c39", "#7b4173"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else out += c;
  }
  return out;
}

}  // namespace

void write_auc_svg(const std::vector<classify::RocSummary>& results, const std::filesystem::path& path) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const classify::RocSummary*>> curves;
  double x_min = 1.0, x_max = 0.0, y_min = 1.0;
  for (const auto& r : results) {
    const std::string name = classify::combo_name(r.combo);
    if (!curves.count(name)) order.push_back(name);
    auto& curve = curves[name];
    x_min = std::min(x_min, r.thr);
    x_max = std::max(x_max, r.thr);
    if (std::isnan(r.auc_mean)) continue;
    curve.push_back(&r);
    y_min = std::min(y_min, r.auc_mean - r.auc_std);
  }
  if (x_max <= x_min) x_max = x_min + 0.01;
  y_min = std::max(0.0, std::floor(y_min * 10.0) / 10.0);
  const double y_max = 1.0;
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * pw; };
  auto py = [&](double y) { return kTop + (y_max - std::clamp(y, y_min, y_max)) / (y_max - y_min) * ph; };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (int i = 0; y_min + 0.1 * i <= y_max + 1e-9; ++i) {
    const double y = y_min + 0.1 * i;
    s << "<line x1=\"" << num(kLeft) << "\" x2=\"" << num(kLeft + pw) << "\" y1=\"" << num(py(y)) << "\" y2=\""
      << num(py(y)) << "\" stroke=\"#ddd\"/>\n";
    s << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(py(y) + 4) << "\" text-anchor=\"end\">" << num(y)
      << "</text>\n";
  }
  for (const auto* r : curves.empty() ? std::vector<const classify::RocSummary*>{} : curves[order.front()]) {
    s << "<text x=\"" << num(px(r->thr)) << "\" y=\"" << num(kTop + ph + 16) << "\" text-anchor=\"middle\">"
      << num(r->thr) << "</text>\n";
  }
  s << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  s << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 12)
    << "\" text-anchor=\"middle\">lesion fraction threshold</text>\n";
  s << "<text transform=\"translate(16," << num(kTop + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">AUC</text>\n";

  for (std::size_t c = 0; c < order.size(); ++c) {
    const auto& curve = curves[order[c]];
    const char* color = kPalette[c % std::size(kPalette)];
    if (!curve.empty()) {
      std::string band;
      for (const auto* r : curve) band += num(px(r->thr)) + "," + num(py(r->auc_mean + r->auc_std)) + " ";
      for (auto it = curve.rbegin(); it != curve.rend(); ++it) {
        band += num(px((*it)->thr)) + "," + num(py((*it)->auc_mean - (*it)->auc_std)) + " ";
      }
      s << "<polygon points=\"" << band << "\" fill=\"" << color << "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";
      std::string line;
      for (const auto* r : curve) line += num(px(r->thr)) + "," + num(py(r->auc_mean)) + " ";
      s << "<polyline points=\"" << line << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    }
    const double ly = kTop + 14.0 + 18.0 * static_cast<double>(c);
    s << "<line x1=\"" << num(kLeft + pw + 14) << "\" x2=\"" << num(kLeft + pw + 34) << "\" y1=\"" << num(ly - 4)
      << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    s << "<text x=\"" << num(kLeft + pw + 40) << "\" y=\"" << num(ly) << "\">" << escape(order[c]) << "</text>\n";
  }
  s << "</svg>\n";

  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write '" + path.string() + "'");
  out << s.str();
}

}  // namespace cordscan::cli
