#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "clonedetect/features.hpp"
#include "clonedetect/geometry.hpp"
#include "clonedetect/image.hpp"

namespace clonedetect {

/// The matrix the pipelines sort: one quantized descriptor row per block,
/// tagged with the block origin in the raster the blocks were cut from.
/// `scale` maps those coordinates back to the original image (1 for spatial
/// pipelines, 2 for pipelines that run on the DWT LL subband).
struct FeatureMatrix {
    int dim = 0;
    int block_size = 0;
    int source_width = 0;   // raster the origins live in
    int source_height = 0;
    int scale = 1;
    std::vector<std::int64_t> values;  // rows() x dim, row-major
    std::vector<Point> origins;

    long long row_count() const { return static_cast<long long>(origins.size()); }
    std::span<const std::int64_t> row(long long i) const {
        return {values.data() + static_cast<std::size_t>(i) * dim, static_cast<std::size_t>(dim)};
    }
};

/// Flips the sign so that (dx, dy) and (-dx, -dy) share one representative:
/// keep v when dx > 0, or dx == 0 and dy > 0.
Shift canonical_shift(Shift v);

/// Unordered pair of matched blocks. `a` is the raster-smaller origin
/// (by (y, x)); `shift` is canonical_shift(b - a), in source-raster pixels.
struct MatchPair {
    Point a;
    Point b;
    Shift shift;

    friend bool operator==(const MatchPair&, const MatchPair&) = default;
};

MatchPair make_pair(Point first, Point second);

/// Rows reordered lexicographically by descriptor values, ties broken by
/// origin (y, x) ascending — a total order, so the permutation is unique.
/// permutation[sorted_index] = original row index.
struct LexSortResult {
    FeatureMatrix sorted;
    std::vector<std::int64_t> permutation;
};

/// Narrow descriptors (the reduced-dimension pipelines) sort via an exact
/// single-key packing when the per-column value ranges fit in 64 bits
/// combined; wide rows fall back to element-wise comparison. Both paths
/// produce the same order.
LexSortResult lex_sort(const FeatureMatrix& fm);

namespace detail {
/// Element-wise comparison path, exposed so tests can pin the packed fast
/// path against it.
LexSortResult lex_sort_generic(const FeatureMatrix& fm);
}  // namespace detail

/// Scans the sorted matrix with a neighborhood of `window` rows and emits a
/// pair for every two rows with exactly equal descriptors. When
/// `overlap_guard` is set, pairs whose block footprints overlap in source
/// coordinates (|dx| < b and |dy| < b) are dropped; those are the trivial
/// self-similarity matches of smooth regions. Output is sorted by (a, b).
std::vector<MatchPair> candidate_pairs(const FeatureMatrix& sorted, int window,
                                       bool overlap_guard = true);

/// Frequency table of canonical shift vectors, binned in original-image
/// pixels (source shifts multiplied by `scale`).
struct ShiftHistogram {
    int scale = 1;
    std::map<std::pair<int, int>, long long> bins;

    long long count_for(Shift source_shift) const;
};

ShiftHistogram shift_histogram(const std::vector<MatchPair>& pairs, int scale = 1);

/// Keeps exactly the pairs whose shift bin holds at least `threshold` pairs
/// (inclusive). Raising the threshold never adds pairs.
std::vector<MatchPair> filter_by_shift(const std::vector<MatchPair>& pairs,
                                       const ShiftHistogram& hist, long long threshold);

enum class MaskLabel : std::uint8_t { none = 0, source = 1, target = 2 };

/// Per-pixel localization verdict at original image resolution.
struct DetectionMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> labels;

    static DetectionMask empty(int w, int h) {
        DetectionMask m;
        m.width = w;
        m.height = h;
        m.labels.assign(static_cast<std::size_t>(w) * h, 0);
        return m;
    }

    MaskLabel at(int x, int y) const {
        return static_cast<MaskLabel>(labels[static_cast<std::size_t>(y) * width + x]);
    }
    void set(int x, int y, MaskLabel l) {
        labels[static_cast<std::size_t>(y) * width + x] = static_cast<std::uint8_t>(l);
    }

    long long labeled_count() const;

    friend bool operator==(const DetectionMask&, const DetectionMask&) = default;
};

/// Paints each accepted pair's footprints into original-image coordinates:
/// the pair's `a` side as source, `b` side as target, squares of side
/// b*scale at origin*scale. A pixel claimed as both ends up target.
DetectionMask build_mask(const std::vector<MatchPair>& accepted, const FeatureMatrix& fm,
                         int image_width, int image_height);

/// The correctness oracle: compares every pair of blocks directly on raw
/// samples (|difference| <= eps per component). Quadratic in the block
/// count — meant for small rasters only. `discard_overlapping` applies the
/// same footprint rule as the candidate overlap guard. Output sorted by
/// (a, b), like candidate_pairs.
std::vector<MatchPair> exhaustive_match(const std::vector<Block>& blocks, double eps,
                                        bool discard_overlapping = true);

}  // namespace clonedetect
