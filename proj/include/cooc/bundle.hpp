#pragma once

#include <filesystem>

#include "cooc/pipeline.hpp"

namespace cooc {

inline constexpr int kBundleFormatVersion = 1;

/// Writes `dir/manifest.json` plus one little-endian float32 file per array.
void save_bundle(const FittedPipeline& model, const std::filesystem::path& dir);

/// Throws DataError on version mismatch or a corrupted array.
FittedPipeline load_bundle(const std::filesystem::path& dir);

}  // namespace cooc
