#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "clonedetect/geometry.hpp"
#include "clonedetect/image.hpp"
#include "clonedetect/matching.hpp"

namespace clonedetect {

enum class Texture { noise, gradient, tiled };

std::string texture_name(Texture t);
Texture parse_texture(const std::string& name);  // throws InvalidInput

enum class CloneShape { rect, ellipse };

std::string shape_name(CloneShape s);
CloneShape parse_shape(const std::string& name);  // throws InvalidInput

/// Recipe for planting one clone. src and dst rectangles must lie inside the
/// image and must not intersect (overlapping clones are out of scope).
struct ForgerySpec {
    Rect src;                // region copied from
    Point dst;               // top-left corner the copy lands on
    int intensity_offset = 0;  // added to copied pixels, clamped to [0, 255]
    CloneShape shape = CloneShape::rect;
    std::uint64_t seed = 0;  // base-image seed, echoed into the sidecar

    Rect dst_rect() const { return {dst.x, dst.y, src.w, src.h}; }
    Shift shift() const { return {dst.x - src.x, dst.y - src.y}; }
};

/// Pixel-exact record of what was planted.
struct GroundTruth {
    DetectionMask mask;  // source / target labels
    Shift shift;
    long long clamped_pixels = 0;  // target pixels where the offset hit the [0,255] clamp
};

struct Score {
    double pixel_precision = 0.0;
    double pixel_recall = 0.0;
    double pixel_f1 = 0.0;
    double pair_recall = 0.0;
};

/// Deterministic synthetic base image (integer-valued samples).
///   noise    — per-pixel values from a seeded splitmix64 stream
///   gradient — diagonal ramp, repeats along anti-diagonals
///   tiled    — a seeded tile_period x tile_period patch repeated across the
///              image, so duplicate blocks exist at shift (period, 0); this
///              is the natural-repeat texture the shift filter must reject
/// Throws InvalidInput for dimensions below 16.
GrayImage synth_base(int width, int height, std::uint64_t seed, Texture texture,
                     int tile_period = 16);

/// Plants the clone and returns the forged image plus ground truth.
/// The destination pixels inside the shape mask become
/// clamp(source + offset); the truth mask records exactly those pixels and
/// their mirrored sources. Throws InvalidSpec when the recipe does not fit.
struct ForgedImage {
    GrayImage image;
    GroundTruth truth;
};

ForgedImage plant_clone(const GrayImage& img, const ForgerySpec& spec);

/// Pixel metrics over the union of source+target labels, side-agnostic
/// (which side a detector calls source is a convention, not evidence).
/// pair_recall is left 0; see score_pairs. Throws InvalidInput on
/// dimension mismatch.
Score score_mask(const DetectionMask& detected, const GroundTruth& truth);

/// Fraction of ground-truth block pairs recovered by the accepted pairs.
/// A truth pair exists for every origin whose b*scale footprint is fully
/// source-labeled and lands fully target-labeled after the truth shift;
/// origins are enumerated on the scale lattice, matching the granularity
/// the detector can report.
double score_pairs(const std::vector<MatchPair>& accepted, int block_size, int scale,
                   const GroundTruth& truth);

/// Convenience: pixel metrics plus pair recall in one Score.
Score score_detection(const DetectionMask& detected, const std::vector<MatchPair>& accepted,
                      int block_size, int scale, const GroundTruth& truth);

/// Ground-truth sidecar: JSON with the recipe, the shift and the truth mask
/// run-length encoded. Written next to every generated fixture.
void write_ground_truth(const std::filesystem::path& path, const ForgerySpec& spec,
                        const GroundTruth& truth, const std::string& texture);

struct GroundTruthFile {
    ForgerySpec spec;
    GroundTruth truth;
    std::string texture;
};

GroundTruthFile load_ground_truth(const std::filesystem::path& path);

}  // namespace clonedetect
