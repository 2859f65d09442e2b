#pragma once

#include <filesystem>

#include "cordscan/io/volume.hpp"

namespace cordscan::io {

/// Reads a single-file NIfTI-1 image (.nii, optionally gzip-compressed;
/// compression is detected from the magic bytes, not the extension).
///
/// Accepted datatypes: uint8, int16, float32, float64, in either byte order.
/// scl_slope / scl_inter are applied when slope is non-zero. The affine is
/// taken from the sform when sform_code > 0, else from the qform, else from
/// pixdim alone.
///
/// Throws Error{UnsupportedFormat} for other datatypes, NIfTI-2 or analyze
/// headers, and Error{CorruptHeader} for truncated or inconsistent files.
Volume read_volume(const std::filesystem::path& path);

/// Writes v as float32 NIfTI-1 with the affine stored as sform and qform.
/// Paths ending in ".gz" are gzip-compressed. Throws Error{IoFailure}.
void write_volume(const Volume& v, const std::filesystem::path& path);

}  // namespace cordscan::io
