#pragma once

#include <cstdint>
#include <vector>

#include "leafarch/errors.hpp"

namespace leafarch::raster {

/// 8-bit grayscale raster, row-major, origin top-left, y down.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

/// 24-bit RGB raster, 3 bytes per pixel, row-major.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;
};

/// Boolean raster, 1 = foreground.
struct BinaryImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    bool at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) { pixels[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    std::size_t count() const;
    bool operator==(const BinaryImage& o) const {
        return width == o.width && height == o.height && pixels == o.pixels;
    }
};

BinaryImage make_binary(int width, int height);

struct PixelPoint {
    int x = 0;
    int y = 0;
    bool operator==(const PixelPoint& o) const { return x == o.x && y == o.y; }
};

/// Closed outer boundary of a component, consecutive points 8-adjacent.
struct PixelContour {
    std::vector<PixelPoint> points;
};

/// Rec. 601 luma, rounded to nearest integer.
GrayImage to_gray(const RgbImage& rgb);

/// Threshold in [0, 255] maximizing between-class variance of the split
/// {<= t} vs {> t}; smallest maximizer on ties. A constant image returns
/// its constant value.
int otsu_threshold(const GrayImage& img);

/// leaf_is_dark: foreground = pixels <= t, otherwise foreground = pixels > t.
BinaryImage binarize(const GrayImage& img, int t, bool leaf_is_dark);

/// Morphological erosion with a rasterized disk: offsets (dx, dy) with
/// dx^2 + dy^2 <= (diameter/2)^2. Pixels outside the image act as
/// foreground, which makes erode/dilate exact duals.
BinaryImage erode(const BinaryImage& img, int diameter);

/// Morphological dilation with the same disk element.
BinaryImage dilate(const BinaryImage& img, int diameter);

/// Erosion followed by dilation at the same diameter.
BinaryImage open_disk(const BinaryImage& img, int diameter);

/// a AND NOT b. Throws ShapeMismatch on differing dimensions.
BinaryImage subtract(const BinaryImage& a, const BinaryImage& b);

BinaryImage complement(const BinaryImage& img);

struct Component {
    std::vector<PixelPoint> pixels;
    int min_x = 0, min_y = 0, max_x = 0, max_y = 0;
    std::size_t area = 0;
};

/// 8-connected foreground components, largest area first (ties keep scan
/// order of the first pixel).
std::vector<Component> connected_components(const BinaryImage& img);

/// Moore-neighbor trace of the outer boundary of the largest component,
/// clockwise in image coordinates. Throws EmptyImage when there is no
/// component with at least 3 pixels.
PixelContour trace_boundary(const BinaryImage& img);

/// Fills background regions not reachable from the image border
/// (4-connected background).
BinaryImage fill_holes(const BinaryImage& img);

/// Mask containing only the given component's pixels.
BinaryImage component_mask(const BinaryImage& like, const Component& comp);

}  // namespace leafarch::raster
