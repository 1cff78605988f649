#pragma once

#include <optional>
#include <string>

#include "cooc/datamodel.hpp"

namespace cooc::detail {

/// Empty string when `video` satisfies the per-video invariants. Infers
/// `descriptor_len` from the first point seen and enforces it afterwards.
std::string check_video(const LabeledVideo& video,
                        std::optional<std::size_t>& descriptor_len);

}  // namespace cooc::detail
