#include "clonedetect/image.hpp"

#include <cmath>
#include <string>

#include "clonedetect/errors.hpp"

namespace clonedetect {

RgbImage RgbImage::filled(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    RgbImage img;
    img.width = w;
    img.height = h;
    const std::size_t n = static_cast<std::size_t>(w) * h;
    img.planes[0].assign(n, r);
    img.planes[1].assign(n, g);
    img.planes[2].assign(n, b);
    return img;
}

GrayImage to_gray(const RgbImage& img) {
    GrayImage out = GrayImage::zeros(img.width, img.height);
    const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
    const std::uint8_t* r = img.planes[0].data();
    const std::uint8_t* g = img.planes[1].data();
    const std::uint8_t* b = img.planes[2].data();
    for (std::size_t i = 0; i < n; ++i) {
        // Algebraically 0.2126 R + 0.7152 G + 0.0722 B; written around the
        // blue term so the gray axis (r == g == b) is reproduced exactly.
        const double blue = b[i];
        out.pixels[i] = blue + 0.2126 * (r[i] - blue) + 0.7152 * (g[i] - blue);
    }
    return out;
}

std::array<GrayImage, 3> split_channels(const RgbImage& img) {
    std::array<GrayImage, 3> out;
    for (int c = 0; c < 3; ++c) {
        out[c] = GrayImage::zeros(img.width, img.height);
        const auto& plane = img.planes[c];
        for (std::size_t i = 0; i < plane.size(); ++i) out[c].pixels[i] = plane[i];
    }
    return out;
}

RgbImage combine_channels(const std::array<GrayImage, 3>& planes) {
    const GrayImage& first = planes[0];
    for (const GrayImage& p : planes) {
        if (p.width != first.width || p.height != first.height)
            throw InvalidInput("combine_channels: plane dimensions differ");
    }
    RgbImage out;
    out.width = first.width;
    out.height = first.height;
    const std::size_t n = static_cast<std::size_t>(first.width) * first.height;
    for (int c = 0; c < 3; ++c) {
        out.planes[c].resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const long v = std::lround(planes[c].pixels[i]);
            out.planes[c][i] = static_cast<std::uint8_t>(std::clamp(v, 0L, 255L));
        }
    }
    return out;
}

BlockGrid block_grid(const GrayImage& img, int block_size) {
    if (block_size < 2)
        throw InvalidBlockSize("block size must be at least 2, got " + std::to_string(block_size));
    if (block_size > img.width || block_size > img.height)
        throw InvalidBlockSize("block size " + std::to_string(block_size) + " exceeds image " +
                               std::to_string(img.width) + "x" + std::to_string(img.height));
    return BlockGrid{block_size, img.width, img.height};
}

Block copy_block(const GrayImage& img, Point origin, int block_size) {
    Block blk;
    blk.origin = origin;
    blk.size = block_size;
    blk.samples.resize(static_cast<std::size_t>(block_size) * block_size);
    for (int y = 0; y < block_size; ++y) {
        const double* src = img.pixels.data() + static_cast<std::size_t>(origin.y + y) * img.width + origin.x;
        std::copy_n(src, block_size, blk.samples.data() + static_cast<std::size_t>(y) * block_size);
    }
    return blk;
}

std::vector<Block> extract_blocks(const GrayImage& img, int block_size) {
    const BlockGrid grid = block_grid(img, block_size);
    std::vector<Block> blocks;
    blocks.reserve(static_cast<std::size_t>(grid.count()));
    for (int y = 0; y < grid.rows(); ++y)
        for (int x = 0; x < grid.cols(); ++x)
            blocks.push_back(copy_block(img, {x, y}, block_size));
    return blocks;
}

}  // namespace clonedetect
