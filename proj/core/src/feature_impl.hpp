#pragma once

// Plan-based DCT on raster windows, shared by the public dct2 and the
// detector pipelines (which avoid materializing Block objects).

#include <cstddef>

#include "clonedetect/features.hpp"
#include "clonedetect/image.hpp"

namespace clonedetect::detail {

// out[u*b + v] = sum_{x,y} f(x, y) basis[u][x] basis[v][y], where f(x, y)
// reads column x of row y. tmp must hold b*b doubles.
inline void dct2_window(const double* window, std::size_t stride, const DctPlan& plan,
                        double* tmp, double* out) {
    const int b = plan.size;
    const double* basis = plan.basis.data();
    // tmp[v*b + x] = sum_y basis[v*b + y] * f(x, y)
    for (int v = 0; v < b; ++v) {
        for (int x = 0; x < b; ++x) {
            double acc = 0.0;
            for (int y = 0; y < b; ++y) acc += basis[v * b + y] * window[y * stride + x];
            tmp[v * b + x] = acc;
        }
    }
    // out[u*b + v] = sum_x basis[u*b + x] * tmp[v*b + x]
    for (int u = 0; u < b; ++u) {
        for (int v = 0; v < b; ++v) {
            double acc = 0.0;
            for (int x = 0; x < b; ++x) acc += basis[u * b + x] * tmp[v * b + x];
            out[u * b + v] = acc;
        }
    }
}

inline const double* window_ptr(const GrayImage& img, Point origin) {
    return img.pixels.data() + static_cast<std::size_t>(origin.y) * img.width + origin.x;
}

}  // namespace clonedetect::detail
