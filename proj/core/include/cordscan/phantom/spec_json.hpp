#pragma once

#include <filesystem>
#include <string>

#include "cordscan/phantom/phantom.hpp"

namespace cordscan::phantom {

/// JSON form of PhantomSpec. Every key is optional and defaults to the
/// PhantomSpec default; unknown keys are rejected so typos do not pass
/// silently. Throws InvalidSpec on malformed JSON or wrong value types.
///
///   {"dims": [80, 80, 16], "voxel_size": [2, 2, 2],
///    "cord_radius": 6.0, "wm_inner_radius": 2.5,
///    "levels": [{"label": 1, "begin": 5, "end": 15,
///                "tissue": {"f": 0.17, "d": 1.1e-3}}, ...],
///    "wm": {"f": 0.16, "d": 1.14e-3}, "gm": {...},
///    "lesions": [{"center": [39.5, 30, 7.5], "radii": [3, 6, 3],
///                 "f": 0.21, "d": 1.02e-3}],
///    "noise": {"model": "rician", "sigma": 50},
///    "s0": 1000, "d0": 3e-3, "lambda_perp": 2e-4,
///    "b": 900, "b0_count": 6, "repeats": 3, "seed": 42}
PhantomSpec parse_spec(const std::string& json_text);
PhantomSpec read_spec(const std::filesystem::path& path);

std::string spec_to_json(const PhantomSpec& spec);
void write_spec(const PhantomSpec& spec, const std::filesystem::path& path);

}  // namespace cordscan::phantom
