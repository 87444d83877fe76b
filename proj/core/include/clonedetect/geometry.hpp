#pragma once

namespace clonedetect {

/// Pixel coordinate, x to the right, y down.
struct Point {
    int x = 0;
    int y = 0;

    friend bool operator==(Point, Point) = default;
};

/// Row-major ordering (y first, then x) used for tie-breaks and pair sides.
inline bool raster_less(Point a, Point b) {
    if (a.y != b.y) return a.y < b.y;
    return a.x < b.x;
}

/// Displacement between two block origins, in pixels.
struct Shift {
    int dx = 0;
    int dy = 0;

    friend bool operator==(Shift, Shift) = default;
};

struct Rect {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    bool intersects(const Rect& o) const {
        return x < o.x + o.w && o.x < x + w && y < o.y + o.h && o.y < y + h;
    }

    friend bool operator==(const Rect&, const Rect&) = default;
};

}  // namespace clonedetect
