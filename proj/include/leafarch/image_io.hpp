#pragma once

#include <filesystem>
#include <string>

#include "leafarch/raster.hpp"

namespace leafarch::io {

/// Decoded raster: 1 channel (gray) or 3 channels (RGB).
struct RasterData {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<std::uint8_t> pixels;  ///< row-major, channels interleaved

    raster::GrayImage gray() const;  ///< luminance for 3-channel input
};

/// Reads PNG (8-bit gray / 24-bit RGB / 32-bit RGBA, alpha dropped) or
/// binary PGM (P5) / PPM (P6), dispatched on the file magic.
RasterData read_image(const std::filesystem::path& path);

RasterData decode_png(const std::vector<std::uint8_t>& bytes);

raster::GrayImage read_pgm(const std::filesystem::path& path);
raster::RgbImage read_ppm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const raster::GrayImage& img);
void write_ppm(const std::filesystem::path& path, const raster::RgbImage& img);

void write_png_gray(const std::filesystem::path& path, const raster::GrayImage& img);
void write_png_rgb(const std::filesystem::path& path, const raster::RgbImage& img);
std::vector<std::uint8_t> encode_png_gray(const raster::GrayImage& img);
std::vector<std::uint8_t> encode_png_rgb(const raster::RgbImage& img);

}  // namespace leafarch::io
