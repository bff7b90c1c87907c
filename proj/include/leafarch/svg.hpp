#pragma once

#include <filesystem>

#include "leafarch/pipeline.hpp"

namespace leafarch::svg {

/// Writes one SVG per preprocessing stage into dir: segmented mask boundary,
/// lamina boundary, petiole, and the rotated geometry with apex/insertion
/// markers. Coordinates are image pixels.
void write_debug_stages(const std::filesystem::path& dir, const pipeline::PipelineResult& result);

}  // namespace leafarch::svg
