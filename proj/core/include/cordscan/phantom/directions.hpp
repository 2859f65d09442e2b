#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "cordscan/io/scheme.hpp"

namespace cordscan::phantom {

/// 30 unit directions minimizing electrostatic energy on the hemisphere.
std::vector<Eigen::Vector3d> electrostatic_directions();

/// b0_count non-weighted entries followed by `repeats` passes over the 30
/// electrostatic directions at the given b-value (96 entries by default).
io::GradientScheme default_scheme(double b = 900.0, std::size_t b0_count = 6, std::size_t repeats = 3);

}  // namespace cordscan::phantom
