#include "clonedetect/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "clonedetect/errors.hpp"

namespace clonedetect {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void png_error_fn(png_structp png, png_const_charp msg) {
    // jump back to the caller's setjmp point; the message is recovered there
    std::longjmp(png_jmpbuf(png), 1);
    (void)msg;
}

void png_warning_fn(png_structp, png_const_charp) {}

RgbImage load_png(std::FILE* f, const std::filesystem::path& path) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_fn,
                                             png_warning_fn);
    if (!png) throw FormatError("libpng initialization failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw FormatError("libpng initialization failed");
    }

    // everything that allocates lives above the setjmp point: longjmp does
    // not unwind, so objects born after it would leak on decode errors
    std::vector<std::uint8_t> rgb;
    std::vector<png_bytep> row_ptrs;
    RgbImage out;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("corrupt or unsupported PNG: " + path.string());
    }

    png_init_io(png, f);
    png_read_info(png, info);

    // normalize everything to 8-bit RGB; gray sources become identical planes
    png_set_palette_to_rgb(png);
    png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (png_get_bit_depth(png, info) == 16) png_set_strip_16(png);
    png_set_gray_to_rgb(png);
    png_set_strip_alpha(png);
    (void)png_set_interlace_handling(png);
    png_read_update_info(png, info);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    if (w == 0 || h == 0 || png_get_channels(png, info) != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("unsupported PNG layout: " + path.string());
    }

    rgb.resize(static_cast<std::size_t>(w) * h * 3);
    row_ptrs.resize(h);
    for (png_uint_32 y = 0; y < h; ++y)
        row_ptrs[y] = rgb.data() + static_cast<std::size_t>(y) * w * 3;
    png_read_image(png, row_ptrs.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    out.width = static_cast<int>(w);
    out.height = static_cast<int>(h);
    const std::size_t n = static_cast<std::size_t>(w) * h;
    for (int c = 0; c < 3; ++c) out.planes[c].resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.planes[0][i] = rgb[i * 3 + 0];
        out.planes[1][i] = rgb[i * 3 + 1];
        out.planes[2][i] = rgb[i * 3 + 2];
    }
    return out;
}

std::uint32_t read_u32le(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::int32_t read_i32le(const std::uint8_t* p) {
    return static_cast<std::int32_t>(read_u32le(p));
}

std::uint16_t read_u16le(const std::uint8_t* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

// Uncompressed 24-bit and 8-bit-palette BMP, bottom-up or top-down.
RgbImage load_bmp(const std::vector<std::uint8_t>& bytes, const std::filesystem::path& path) {
    auto bad = [&](const char* why) -> FormatError {
        return FormatError(std::string("bad BMP (") + why + "): " + path.string());
    };
    if (bytes.size() < 54) throw bad("truncated header");
    const std::uint32_t pixel_offset = read_u32le(&bytes[10]);
    const std::uint32_t header_size = read_u32le(&bytes[14]);
    if (header_size < 40) throw bad("unsupported header");
    const std::int32_t w = read_i32le(&bytes[18]);
    const std::int32_t h_raw = read_i32le(&bytes[22]);
    const std::uint16_t planes = read_u16le(&bytes[26]);
    const std::uint16_t bpp = read_u16le(&bytes[28]);
    const std::uint32_t compression = read_u32le(&bytes[30]);
    if (planes != 1 || compression != 0) throw bad("compressed or multi-plane");
    if (w <= 0 || h_raw == 0) throw bad("dimensions");
    const bool top_down = h_raw < 0;
    const int h = top_down ? -h_raw : h_raw;

    RgbImage out;
    out.width = w;
    out.height = h;
    const std::size_t n = static_cast<std::size_t>(w) * h;
    for (int c = 0; c < 3; ++c) out.planes[c].resize(n);

    const std::size_t row_stride = (static_cast<std::size_t>(w) * bpp / 8 + 3) & ~std::size_t(3);
    if (bytes.size() < pixel_offset + row_stride * h) throw bad("truncated pixel data");

    const std::uint8_t* palette = nullptr;
    std::uint32_t palette_entries = 0;
    if (bpp == 8) {
        palette_entries = read_u32le(&bytes[46]);
        if (palette_entries == 0) palette_entries = 256;
        const std::size_t palette_at = 14 + header_size;
        if (bytes.size() < palette_at + palette_entries * 4) throw bad("truncated palette");
        palette = &bytes[palette_at];
    } else if (bpp != 24) {
        throw bad("unsupported bit depth");
    }

    for (int row = 0; row < h; ++row) {
        const int y = top_down ? row : h - 1 - row;
        const std::uint8_t* src = &bytes[pixel_offset + row_stride * row];
        for (int x = 0; x < w; ++x) {
            std::uint8_t r, g, b;
            if (bpp == 24) {
                b = src[x * 3 + 0];
                g = src[x * 3 + 1];
                r = src[x * 3 + 2];
            } else {
                const std::uint8_t idx = src[x];
                if (idx >= palette_entries) throw bad("palette index out of range");
                b = palette[idx * 4 + 0];
                g = palette[idx * 4 + 1];
                r = palette[idx * 4 + 2];
            }
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            out.planes[0][i] = r;
            out.planes[1][i] = g;
            out.planes[2][i] = b;
        }
    }
    return out;
}

void save_png_impl(const std::filesystem::path& path, int width, int height, int channels,
                   const std::vector<std::uint8_t>& interleaved) {
    FilePtr f(std::fopen(path.string().c_str(), "wb"));
    if (!f) throw IoError("cannot open for writing: " + path.string());

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_fn,
                                              png_warning_fn);
    if (!png) throw FormatError("libpng initialization failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw FormatError("libpng initialization failed");
    }
    std::vector<png_bytep> rows(height);  // above the setjmp point, see load_png
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("PNG write failed: " + path.string());
    }
    png_init_io(png, f.get());
    png_set_IHDR(png, info, width, height, 8,
                 channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < height; ++y)
        rows[y] = const_cast<png_bytep>(interleaved.data() +
                                        static_cast<std::size_t>(y) * width * channels);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace

RgbImage load_image(const std::filesystem::path& path) {
    std::error_code ec;
    if (!std::filesystem::exists(path, ec) || ec)
        throw IoError("no such file: " + path.string());

    FilePtr f(std::fopen(path.string().c_str(), "rb"));
    if (!f) throw IoError("cannot open: " + path.string());

    std::uint8_t magic[8] = {};
    const std::size_t got = std::fread(magic, 1, sizeof magic, f.get());
    if (got >= 8 && png_sig_cmp(magic, 0, 8) == 0) {
        std::rewind(f.get());
        return load_png(f.get(), path);
    }
    if (got >= 2 && magic[0] == 'B' && magic[1] == 'M') {
        std::ifstream in(path, std::ios::binary);
        std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
        return load_bmp(bytes, path);
    }
    throw FormatError("not a PNG or BMP file: " + path.string());
}

void save_png_gray(const GrayImage& img, const std::filesystem::path& path) {
    std::vector<std::uint8_t> bytes(img.pixels.size());
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        const long v = std::lround(img.pixels[i]);
        bytes[i] = static_cast<std::uint8_t>(std::clamp(v, 0L, 255L));
    }
    save_png_impl(path, img.width, img.height, 1, bytes);
}

void save_png_rgb(const RgbImage& img, const std::filesystem::path& path) {
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(img.width) * img.height * 3);
    const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
    for (std::size_t i = 0; i < n; ++i) {
        bytes[i * 3 + 0] = img.planes[0][i];
        bytes[i * 3 + 1] = img.planes[1][i];
        bytes[i * 3 + 2] = img.planes[2][i];
    }
    save_png_impl(path, img.width, img.height, 3, bytes);
}

}  // namespace clonedetect
