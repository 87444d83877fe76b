#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "clonedetect/geometry.hpp"

namespace clonedetect {

/// Whether samples are camera-domain intensities in [0, 255] or the output
/// of a transform (DWT subbands), which may exceed that range.
enum class PixelDomain { spatial, transform };

/// Single-channel raster with real-valued samples, row-major.
struct GrayImage {
    int width = 0;
    int height = 0;
    PixelDomain domain = PixelDomain::spatial;
    std::vector<double> pixels;

    static GrayImage zeros(int w, int h, PixelDomain d = PixelDomain::spatial) {
        GrayImage img;
        img.width = w;
        img.height = h;
        img.domain = d;
        img.pixels.assign(static_cast<std::size_t>(w) * h, 0.0);
        return img;
    }

    double at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    double& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }

    std::span<const double> row(int y) const {
        return {pixels.data() + static_cast<std::size_t>(y) * width, static_cast<std::size_t>(width)};
    }
};

/// Three 8-bit planes (r, g, b), each width*height, row-major.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::array<std::vector<std::uint8_t>, 3> planes;

    static RgbImage filled(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b);

    friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

/// b x b window copied verbatim from a raster.
struct Block {
    Point origin;
    int size = 0;
    std::vector<double> samples;  // size*size, row-major
};

/// Arithmetic over the overlapped-block tiling of a raster: one block per
/// pixel offset, (W-b+1)*(H-b+1) in total, enumerated left-to-right then
/// top-to-bottom.
struct BlockGrid {
    int block_size = 0;
    int image_width = 0;
    int image_height = 0;

    int cols() const { return image_width - block_size + 1; }
    int rows() const { return image_height - block_size + 1; }
    long long count() const { return static_cast<long long>(cols()) * rows(); }

    Point origin_of(long long index) const {
        return {static_cast<int>(index % cols()), static_cast<int>(index / cols())};
    }
    long long index_of(Point origin) const {
        return static_cast<long long>(origin.y) * cols() + origin.x;
    }
};

/// Gray = 0.2126 R + 0.7152 G + 0.0722 B, kept at full double precision.
/// Exact on the gray axis (r == g == b reproduces the plane value).
GrayImage to_gray(const RgbImage& img);

/// One GrayImage per plane, values copied verbatim.
std::array<GrayImage, 3> split_channels(const RgbImage& img);

/// Inverse of split_channels for spatial planes with integral samples.
RgbImage combine_channels(const std::array<GrayImage, 3>& planes);

/// Validates b against the raster and returns the tiling descriptor.
/// Throws InvalidBlockSize if b < 2 or b > min(W, H).
BlockGrid block_grid(const GrayImage& img, int block_size);

/// Verbatim copy of the b x b window at `origin` (caller keeps it in range).
Block copy_block(const GrayImage& img, Point origin, int block_size);

/// All overlapped blocks in raster order. Materializes count()*b*b samples;
/// meant for oracles and small images, the detectors stream instead.
std::vector<Block> extract_blocks(const GrayImage& img, int block_size);

}  // namespace clonedetect
