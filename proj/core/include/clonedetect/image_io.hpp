#pragma once

#include <filesystem>

#include "clonedetect/image.hpp"

namespace clonedetect {

/// Decodes a PNG or BMP file (sniffed by magic bytes, not extension).
/// Grayscale sources come back as three identical planes; alpha is dropped.
/// Throws IoError if the file cannot be read, FormatError for anything that
/// is not a well-formed PNG or BMP we support.
RgbImage load_image(const std::filesystem::path& path);

/// Writes an 8-bit grayscale PNG; samples are rounded and clamped to [0, 255].
void save_png_gray(const GrayImage& img, const std::filesystem::path& path);

/// Writes an 8-bit RGB PNG.
void save_png_rgb(const RgbImage& img, const std::filesystem::path& path);

}  // namespace clonedetect
