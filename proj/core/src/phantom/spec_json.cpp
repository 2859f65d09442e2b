#include "cordscan/phantom/spec_json.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cordscan/error.hpp"

namespace cordscan::phantom {
namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw Error(ErrorCode::InvalidSpec, "unknown key '" + key + "' in " + where);
  }
}

TissueParams tissue_from(const json& j, TissueParams t, const std::string& where) {
  reject_unknown(j, {"f", "d"}, where);
  if (j.contains("f")) t.f = j.at("f").get<double>();
  if (j.contains("d")) t.d = j.at("d").get<double>();
  return t;
}

json tissue_to(const TissueParams& t) { return {{"f", t.f}, {"d", t.d}}; }

template <typename T, std::size_t N>
std::array<T, N> array_from(const json& j, const std::string& key) {
  const auto v = j.at(key).get<std::vector<T>>();
  if (v.size() != N) throw Error(ErrorCode::InvalidSpec, key + " must have " + std::to_string(N) + " entries");
  std::array<T, N> out{};
  std::copy(v.begin(), v.end(), out.begin());
  return out;
}

Eigen::Vector3d vec3_from(const json& j, const std::string& key) {
  const auto a = array_from<double, 3>(j, key);
  return {a[0], a[1], a[2]};
}

PhantomSpec from_json(const json& j) {
  reject_unknown(j,
                 {"dims", "voxel_size", "cord_radius", "wm_inner_radius", "levels", "wm", "gm", "lesions", "noise",
                  "s0", "d0", "lambda_perp", "b", "b0_count", "repeats", "seed"},
                 "phantom spec");
  PhantomSpec s;
  if (j.contains("dims")) s.dims = array_from<std::size_t, 3>(j, "dims");
  if (j.contains("voxel_size")) s.voxel_size = array_from<double, 3>(j, "voxel_size");
  if (j.contains("cord_radius")) s.cord_radius = j.at("cord_radius").get<double>();
  if (j.contains("wm_inner_radius")) s.wm_inner_radius = j.at("wm_inner_radius").get<double>();
  if (j.contains("levels")) {
    s.levels.clear();
    for (const auto& l : j.at("levels")) {
      reject_unknown(l, {"label", "begin", "end", "tissue"}, "levels");
      LevelRange range{l.at("label").get<int>(), l.at("begin").get<std::size_t>(), l.at("end").get<std::size_t>(), {}};
      if (l.contains("tissue")) range.tissue = tissue_from(l.at("tissue"), TissueParams{}, "levels.tissue");
      s.levels.push_back(range);
    }
  }
  if (j.contains("wm")) s.wm = tissue_from(j.at("wm"), s.wm, "wm");
  if (j.contains("gm")) s.gm = tissue_from(j.at("gm"), s.gm, "gm");
  if (j.contains("lesions")) {
    for (const auto& l : j.at("lesions")) {
      reject_unknown(l, {"center", "radii", "f", "d"}, "lesions");
      LesionSpec lesion;
      lesion.center = vec3_from(l, "center");
      lesion.radii = vec3_from(l, "radii");
      if (l.contains("f")) lesion.params.f = l.at("f").get<double>();
      if (l.contains("d")) lesion.params.d = l.at("d").get<double>();
      s.lesions.push_back(lesion);
    }
  }
  if (j.contains("noise")) {
    const auto& n = j.at("noise");
    reject_unknown(n, {"model", "sigma"}, "noise");
    if (n.contains("model")) s.noise.model = parse_noise_model(n.at("model").get<std::string>());
    if (n.contains("sigma")) s.noise.sigma = n.at("sigma").get<double>();
  }
  if (j.contains("s0")) s.s0 = j.at("s0").get<double>();
  if (j.contains("d0")) s.d0 = j.at("d0").get<double>();
  if (j.contains("lambda_perp")) s.lambda_perp = j.at("lambda_perp").get<double>();
  if (j.contains("b")) s.b = j.at("b").get<double>();
  if (j.contains("b0_count")) s.b0_count = j.at("b0_count").get<std::size_t>();
  if (j.contains("repeats")) s.repeats = j.at("repeats").get<std::size_t>();
  if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
  return s;
}

}  // namespace

PhantomSpec parse_spec(const std::string& json_text) {
  try {
    return from_json(json::parse(json_text));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidSpec, e.what());
  }
}

PhantomSpec read_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_spec(text.str());
}

std::string spec_to_json(const PhantomSpec& s) {
  json levels = json::array();
  for (const auto& l : s.levels) {
    json range = {{"label", l.label}, {"begin", l.begin}, {"end", l.end}};
    if (l.tissue) range["tissue"] = tissue_to(*l.tissue);
    levels.push_back(range);
  }
  json lesions = json::array();
  for (const auto& l : s.lesions) {
    lesions.push_back({{"center", {l.center.x(), l.center.y(), l.center.z()}},
                       {"radii", {l.radii.x(), l.radii.y(), l.radii.z()}},
                       {"f", l.params.f},
                       {"d", l.params.d}});
  }
  const json j = {{"dims", s.dims},
                  {"voxel_size", s.voxel_size},
                  {"cord_radius", s.cord_radius},
                  {"wm_inner_radius", s.wm_inner_radius},
                  {"levels", levels},
                  {"wm", tissue_to(s.wm)},
                  {"gm", tissue_to(s.gm)},
                  {"lesions", lesions},
                  {"noise", {{"model", to_string(s.noise.model)}, {"sigma", s.noise.sigma}}},
                  {"s0", s.s0},
                  {"d0", s.d0},
                  {"lambda_perp", s.lambda_perp},
                  {"b", s.b},
                  {"b0_count", s.b0_count},
                  {"repeats", s.repeats},
                  {"seed", s.seed}};
  return j.dump(2);
}

void write_spec(const PhantomSpec& spec, const std::filesystem::path& path) {
  std::ofstream out(path);
  out << spec_to_json(spec) << '\n';
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
}

}  // namespace cordscan::phantom
