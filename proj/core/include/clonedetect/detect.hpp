#pragma once

#include <string>
#include <vector>

#include "clonedetect/image.hpp"
#include "clonedetect/matching.hpp"

namespace clonedetect {

/// The seven pipelines: plain overlapped block matching and its
/// feature-reduced variants.
enum class Method { sobm, dct, pca, svd, dwt, dctsvd, dwtsvd };

std::string method_name(Method m);
Method parse_method(const std::string& name);  // throws InvalidInput
const std::vector<Method>& all_methods();

/// True for the pipelines that match blocks on the DWT LL subband
/// (half-resolution raster, scale 2).
bool is_dwt_family(Method m);
/// True for the pipelines whose features start from a DCT (need even b).
bool is_dct_family(Method m);

enum class ColorMode { gray, per_channel };

struct DetectorConfig {
    Method method = Method::sobm;
    int block_size = 4;
    double quant_step = 0.0;   // 0 = method default: 1.0 raw-pixel, 2.0 transform
    int shift_threshold = 100; // spatial-equivalent TH; dwt-family runs at TH/4
    int sort_window = 1;
    bool overlap_guard = true;
    ColorMode color_mode = ColorMode::gray;
};

/// Resolves quant_step == 0: raw-pixel descriptors (sobm, dwt) round to
/// integers, transform descriptors (dct, pca, svd, dctsvd, dwtsvd) use 2.0.
double effective_quant_step(const DetectorConfig& cfg);

/// dwt-family pair populations shrink by ~4x, so the threshold scales to
/// TH/4 (floor, at least 1) to keep sensitivity comparable.
long long effective_shift_threshold(const DetectorConfig& cfg);

/// Throws InvalidInput / InvalidBlockSize when the config is inconsistent
/// (b < 2, odd b for the dct family, TH < 1, q < 0, w < 1).
void validate_config(const DetectorConfig& cfg);

struct ShiftBin {
    int dx = 0;
    int dy = 0;
    long long count = 0;

    friend bool operator==(const ShiftBin&, const ShiftBin&) = default;
};

struct StageTimings {
    double feature_s = 0.0;
    double sort_s = 0.0;
    double match_s = 0.0;
    double filter_s = 0.0;
    double total_s = 0.0;
};

/// Per-plane results when color_mode == per_channel.
struct ChannelReport {
    std::string channel;
    long long matched_block_count = 0;
    long long accepted_pair_count = 0;
    std::vector<ShiftBin> accepted_bins;
};

struct DetectionReport {
    DetectorConfig config;
    int feature_dim = 0;        // descriptor length d of the pipeline that ran
    long long feature_rows = 0; // blocks the pipeline descriptorized (R, or R/4-ish for dwt)
    bool tampering_detected = false;
    long long matched_block_count = 0;  // distinct block origins among accepted pairs
    long long accepted_pair_count = 0;
    std::vector<ShiftBin> accepted_bins;  // original-image pixels, sorted by (dx, dy)
    std::vector<MatchPair> accepted_pairs;  // source-raster coordinates
    DetectionMask mask;                  // original image resolution
    StageTimings timings;
    std::vector<ChannelReport> channels; // empty in gray mode
};

/// Runs the configured pipeline end to end: features, lexicographic sort,
/// neighbor matching, shift filtering, mask. Deterministic for a given input
/// and config regardless of the worker thread count.
/// Throws InvalidInput when the image is too small for the method.
DetectionReport detect(const RgbImage& img, const DetectorConfig& cfg);

/// Same, for an already-gray raster (color_mode is ignored).
DetectionReport detect_gray(const GrayImage& img, const DetectorConfig& cfg);

/// Smallest clone side the pipeline can represent at all: b for spatial
/// pipelines, 2b for the dwt family (one LL block must fit inside).
int min_detectable_clone(const DetectorConfig& cfg);

}  // namespace clonedetect
