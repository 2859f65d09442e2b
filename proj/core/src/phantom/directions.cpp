#include "cordscan/phantom/directions.hpp"

namespace cordscan::phantom {
namespace {

// 30 antipodal point pairs minimizing the Coulomb energy of their 60 charges
// (energy 764.432328810217), one representative per pair with z >= 0.
constexpr double kDirections30[30][3] = {
    {-0.82211537869734996, -0.55803273217702154, 0.11280857205178012},
    {0.32105227617582377, 0.07013975832276835, 0.94446061340044574},
    {-0.78206862081394013, -0.34659006479877136, 0.51792277351065108},
    {-0.87096297735482742, 0.43704800414074235, 0.22452735725030934},
    {0.30620976468063138, 0.80815772608555869, 0.50310701623258192},
    {-0.17946577605728911, 0.74619309888012664, 0.64108337555097206},
    {0.35636880032860796, -0.77780672352458824, 0.51770452865731575},
    {0.33858092476612323, -0.93749265514579538, 0.08043928724325977},
    {0.69615775454884832, 0.65109768763963805, 0.30238416283235131},
    {-0.04058779649183131, -0.68454478153797771, 0.72784000497709667},
    {-0.52703412855873033, -0.00884688490753794, 0.84979807010946584},
    {-0.02365790135653968, 0.97286066734751908, 0.23017911641055563},
    {-0.07615030585324067, -0.94748698971595735, 0.31059545269924871},
    {-0.07146186328177843, -0.19522626837830054, 0.97815126960577026},
    {0.34062720269411095, -0.39554592210463085, 0.85294579680726623},
    {-0.41713240857652956, -0.45697409698689900, 0.78560500787491894},
    {-0.84089406702589464, 0.11540472580863229, 0.52875222675813349},
    {-0.18605800067400272, 0.28430202284053208, 0.94050772468596688},
    {0.91834706416474043, 0.23231293978923298, 0.32042061067678901},
    {0.72186512627686450, -0.67857042483620578, 0.13584151796449320},
    {0.60724886190342342, 0.40154292657152030, 0.68557428323805703},
    {0.69758438007815005, -0.46206211397692015, 0.54760810393762693},
    {-0.56341946967326739, 0.46926457344290862, 0.67996269111219576},
    {0.94831503711918153, -0.23055129515265874, 0.21804745051726035},
    {-0.53153770925521127, 0.78249265496280740, 0.32430372888540654},
    {0.72713517984801324, -0.04123941325958944, 0.68525450820946976},
    {-0.98744904489882124, -0.09228054047860824, 0.12817443418007204},
    {0.18166131606419783, 0.51140479393143856, 0.83991922408632036},
    {-0.49549167900501356, -0.75677152703422157, 0.42636234813487600},
    {0.41782822187403057, 0.90836616659604585, 0.01704360258838006},
};

}  // namespace

std::vector<Eigen::Vector3d> electrostatic_directions() {
  std::vector<Eigen::Vector3d> out;
  out.reserve(30);
  for (const auto& d : kDirections30) out.emplace_back(Eigen::Vector3d(d[0], d[1], d[2]).normalized());
  return out;
}

io::GradientScheme default_scheme(double b, std::size_t b0_count, std::size_t repeats) {
  std::vector<io::GradientEntry> entries;
  entries.reserve(b0_count + repeats * 30);
  for (std::size_t i = 0; i < b0_count; ++i) entries.push_back({0.0, Eigen::Vector3d::Zero()});
  const auto dirs = electrostatic_directions();
  for (std::size_t r = 0; r < repeats; ++r) {
    for (const auto& g : dirs) entries.push_back({b, g});
  }
  return io::GradientScheme(std::move(entries));
}

}  // namespace cordscan::phantom
