#pragma once

#include <array>
#include <optional>

#include "leafarch/geometry.hpp"
#include "leafarch/image_io.hpp"
#include "leafarch/raster.hpp"

namespace leafarch::pipeline {

/// Number of equally spaced arc-length samples on the canonical boundary.
/// Large enough that a 1% decimation retain still carries the sinus/apex
/// vertices of heavily lobed leaves.
inline constexpr std::size_t kBoundarySamples = 2048;

/// Petiole mask plus the two connection points where it meets the lamina
/// (image pixel coordinates, y down).
struct PetioleInfo {
    raster::BinaryImage petiole_mask;
    std::array<geom::Point2, 2> insertion_points;
    bool present = false;
};

/// Canonical per-leaf geometry: Cartesian (y-up) boundary rotated so the
/// estimated midvein (apex -> petiole insertion midpoint) is vertical.
struct LeafGeometry {
    geom::Polygon boundary;  ///< resampled, counter-clockwise, vertex 0 = apex
    geom::Point2 apex;
    std::array<geom::Point2, 2> insertion_points;
    bool reflex_apex = false;
    bool reflex_base = false;
    double lamina_length = 0.0;  ///< L = y_max - y_min of the boundary
    geom::Point2 centroid;
    double image_width = 0.0;  ///< source image width, for percentage thresholds

    geom::Point2 insertion_midpoint() const {
        return {(insertion_points[0].x + insertion_points[1].x) * 0.5,
                (insertion_points[0].y + insertion_points[1].y) * 0.5};
    }
};

/// Structuring-element diameter for a width percentage: nearest odd
/// integer >= 3 of frac * image_width.
int odd_element_diameter(double frac, int image_width);

/// Otsu segmentation: largest foreground component with holes filled.
/// Throws SegmentationFailed when no plausible leaf foreground exists.
raster::BinaryImage segment(const io::RasterData& image, bool leaf_is_dark = true);

/// Locates the petiole with a disk opening (5% of image width) and removes
/// it from the leaf. The lamina keeps its margin detail; only the petiole
/// pixels are subtracted.
struct PetioleRemoval {
    raster::BinaryImage lamina;
    PetioleInfo info;
};
PetioleRemoval remove_petiole(const raster::BinaryImage& leaf);

/// True when the insertion midpoint sits clearly above the lowest lamina
/// boundary point (basal extension -> reflex base).
bool detect_basal_extension(const raster::BinaryImage& lamina, const PetioleInfo& info);

struct ApexDetection {
    raster::PixelPoint apex;
    bool reflex = false;
};

/// Scans the upper envelope of the top 25% of the lamina for an interior
/// local minimum (a notch). A notch must be deep against both flanks and
/// must sit on the estimated midvein direction (insertion midpoint toward
/// the topmost point) -- the sinuses of lobed leaves flank the terminal
/// lobe and do not qualify. Notch -> apex at the notch bottom, reflex.
/// Otherwise the apex is the topmost lamina pixel (ties: smallest x).
ApexDetection detect_apex(const raster::BinaryImage& lamina, const PetioleInfo& info);

/// Traces the lamina boundary, converts to Cartesian y-up, rotates the
/// apex above the insertion midpoint, and resamples to kBoundarySamples
/// arc-length-uniform vertices starting at the apex.
LeafGeometry build_geometry(const raster::BinaryImage& lamina, raster::PixelPoint apex,
                            const PetioleInfo& info, bool reflex_apex, bool reflex_base,
                            int image_width);

/// Full preprocessing result.
struct PipelineResult {
    raster::BinaryImage segmented;  ///< pre-opening leaf mask (for organization)
    raster::BinaryImage lamina;
    PetioleInfo petiole;
    LeafGeometry geometry;
};

PipelineResult process(const io::RasterData& image, bool leaf_is_dark = true);

}  // namespace leafarch::pipeline
