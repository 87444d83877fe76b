#include "clonedetect/detect.hpp"

#include <algorithm>
#include <chrono>
#include <string>

#include "clonedetect/errors.hpp"
#include "clonedetect/features.hpp"
#include "clonedetect/parallel.hpp"
#include "feature_impl.hpp"
#include "sym_jacobi.hpp"

namespace clonedetect {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

FeatureMatrix alloc_matrix(const GrayImage& raster, int block_size, int dim, int scale) {
    const BlockGrid grid{block_size, raster.width, raster.height};
    FeatureMatrix fm;
    fm.dim = dim;
    fm.block_size = block_size;
    fm.source_width = raster.width;
    fm.source_height = raster.height;
    fm.scale = scale;
    fm.values.resize(static_cast<std::size_t>(grid.count()) * dim);
    fm.origins.resize(static_cast<std::size_t>(grid.count()));
    return fm;
}

// sobm and dwt: the raw (quantized) window samples are the descriptor.
FeatureMatrix raw_feature_matrix(const GrayImage& raster, int b, double q, int scale) {
    FeatureMatrix fm = alloc_matrix(raster, b, b * b, scale);
    const BlockGrid grid{b, raster.width, raster.height};
    const double inv_q = 1.0 / q;
    parallel_chunks(grid.count(), [&](long long, long long begin, long long end) {
        for (long long i = begin; i < end; ++i) {
            const Point origin = grid.origin_of(i);
            fm.origins[static_cast<std::size_t>(i)] = origin;
            std::int64_t* row = fm.values.data() + static_cast<std::size_t>(i) * fm.dim;
            const double* window = detail::window_ptr(raster, origin);
            for (int y = 0; y < b; ++y)
                for (int x = 0; x < b; ++x)
                    row[y * b + x] = quantize_value(window[static_cast<std::size_t>(y) * raster.width + x], inv_q);
        }
    });
    return fm;
}

FeatureMatrix dct_feature_matrix(const GrayImage& raster, int b, double q) {
    FeatureMatrix fm = alloc_matrix(raster, b, b * b / 4, 1);
    const BlockGrid grid{b, raster.width, raster.height};
    const DctPlan plan(b);
    const double inv_q = 1.0 / q;
    const int half = b / 2;
    parallel_chunks(grid.count(), [&](long long, long long begin, long long end) {
        std::vector<double> tmp(static_cast<std::size_t>(b) * b);
        std::vector<double> coeffs(static_cast<std::size_t>(b) * b);
        for (long long i = begin; i < end; ++i) {
            const Point origin = grid.origin_of(i);
            fm.origins[static_cast<std::size_t>(i)] = origin;
            detail::dct2_window(detail::window_ptr(raster, origin),
                                static_cast<std::size_t>(raster.width), plan, tmp.data(),
                                coeffs.data());
            std::int64_t* row = fm.values.data() + static_cast<std::size_t>(i) * fm.dim;
            std::size_t k = 0;
            for (int u = 0; u < half; ++u)
                for (int v = 0; v < half; ++v, ++k)
                    row[k] = quantize_value(coeffs[static_cast<std::size_t>(u) * b + v], inv_q);
            row[0] = 0;  // DC pinned, see dct_features
        }
    });
    return fm;
}

// svd and dwtsvd: descending singular values of each window.
FeatureMatrix sv_feature_matrix(const GrayImage& raster, int b, double q, int scale) {
    FeatureMatrix fm = alloc_matrix(raster, b, b, scale);
    const BlockGrid grid{b, raster.width, raster.height};
    const double inv_q = 1.0 / q;
    parallel_chunks(grid.count(), [&](long long, long long begin, long long end) {
        detail::SymJacobiBatch batch(b);
        std::vector<double> sigma(static_cast<std::size_t>(b));
        for (long long base = begin; base < end; base += detail::SymJacobiBatch::kLanes) {
            const int lanes = static_cast<int>(
                std::min<long long>(detail::SymJacobiBatch::kLanes, end - base));
            for (int l = 0; l < lanes; ++l) {
                const Point origin = grid.origin_of(base + l);
                fm.origins[static_cast<std::size_t>(base + l)] = origin;
                batch.load_gram_from_raster(raster, origin, l);
            }
            batch.run(lanes);
            for (int l = 0; l < lanes; ++l) {
                batch.extract_singular_values(l, sigma.data());
                std::int64_t* row =
                    fm.values.data() + static_cast<std::size_t>(base + l) * fm.dim;
                for (int k = 0; k < b; ++k) row[k] = quantize_value(sigma[k], inv_q);
            }
        }
    });
    return fm;
}

// dctsvd: singular values of each block's DCT coefficient matrix.
FeatureMatrix dctsvd_feature_matrix(const GrayImage& raster, int b, double q) {
    FeatureMatrix fm = alloc_matrix(raster, b, b, 1);
    const BlockGrid grid{b, raster.width, raster.height};
    const DctPlan plan(b);
    const double inv_q = 1.0 / q;
    const std::size_t per_block = static_cast<std::size_t>(b) * b;
    parallel_chunks(grid.count(), [&](long long, long long begin, long long end) {
        detail::SymJacobiBatch batch(b);
        std::vector<double> tmp(per_block);
        std::vector<double> coeffs(per_block * detail::SymJacobiBatch::kLanes);
        std::vector<double> sigma(static_cast<std::size_t>(b));
        for (long long base = begin; base < end; base += detail::SymJacobiBatch::kLanes) {
            const int lanes = static_cast<int>(
                std::min<long long>(detail::SymJacobiBatch::kLanes, end - base));
            for (int l = 0; l < lanes; ++l) {
                const Point origin = grid.origin_of(base + l);
                fm.origins[static_cast<std::size_t>(base + l)] = origin;
                detail::dct2_window(detail::window_ptr(raster, origin),
                                    static_cast<std::size_t>(raster.width), plan, tmp.data(),
                                    coeffs.data() + per_block * l);
                batch.load_gram_from_samples(coeffs.data() + per_block * l, l);
            }
            batch.run(lanes);
            for (int l = 0; l < lanes; ++l) {
                batch.extract_singular_values(l, sigma.data());
                std::int64_t* row =
                    fm.values.data() + static_cast<std::size_t>(base + l) * fm.dim;
                for (int k = 0; k < b; ++k) row[k] = quantize_value(sigma[k], inv_q);
            }
        }
    });
    return fm;
}

FeatureMatrix pca_feature_matrix(const GrayImage& raster, int b, double q) {
    const BlockGrid grid{b, raster.width, raster.height};
    const int dim = b * b;

    Matrix samples(static_cast<int>(grid.count()), dim);
    parallel_chunks(grid.count(), [&](long long, long long begin, long long end) {
        for (long long i = begin; i < end; ++i) {
            const Point origin = grid.origin_of(i);
            double* row = samples.data.data() + static_cast<std::size_t>(i) * dim;
            const double* window = detail::window_ptr(raster, origin);
            for (int y = 0; y < b; ++y)
                for (int x = 0; x < b; ++x)
                    row[y * b + x] = window[static_cast<std::size_t>(y) * raster.width + x];
        }
    });

    const PcaBasis basis = pca_fit(samples, b);

    FeatureMatrix fm = alloc_matrix(raster, b, b, 1);
    const double inv_q = 1.0 / q;
    parallel_chunks(grid.count(), [&](long long, long long begin, long long end) {
        std::vector<double> centered(static_cast<std::size_t>(dim));
        for (long long i = begin; i < end; ++i) {
            fm.origins[static_cast<std::size_t>(i)] = grid.origin_of(i);
            const double* row = samples.data.data() + static_cast<std::size_t>(i) * dim;
            double residual_mean = 0.0;
            for (int c = 0; c < dim; ++c) {
                centered[c] = row[c] - basis.mean[c];
                residual_mean += centered[c];
            }
            residual_mean /= dim;
            for (int c = 0; c < dim; ++c) centered[c] -= residual_mean;
            std::int64_t* out = fm.values.data() + static_cast<std::size_t>(i) * fm.dim;
            for (int k = 0; k < basis.k; ++k) {
                double dot = 0.0;
                const double* comp =
                    basis.components.data.data() + static_cast<std::size_t>(k) * dim;
                for (int c = 0; c < dim; ++c) dot += centered[c] * comp[c];
                out[k] = quantize_value(dot, inv_q);
            }
        }
    });
    return fm;
}

struct PipelineResult {
    FeatureMatrix meta;  // values dropped after matching; meta fields used for the mask
    long long rows = 0;
    std::vector<MatchPair> accepted;
    std::vector<ShiftBin> bins;
    StageTimings timings;
};

PipelineResult run_pipeline(const GrayImage& gray, const DetectorConfig& cfg) {
    const double q = effective_quant_step(cfg);
    const long long threshold = effective_shift_threshold(cfg);
    const int b = cfg.block_size;

    PipelineResult result;
    auto total0 = Clock::now();

    auto t0 = Clock::now();
    FeatureMatrix fm;
    switch (cfg.method) {
        case Method::sobm:
            fm = raw_feature_matrix(gray, b, q, 1);
            break;
        case Method::dct:
            fm = dct_feature_matrix(gray, b, q);
            break;
        case Method::pca:
            fm = pca_feature_matrix(gray, b, q);
            break;
        case Method::svd:
            fm = sv_feature_matrix(gray, b, q, 1);
            break;
        case Method::dwt:
            fm = raw_feature_matrix(haar_dwt(gray).ll, b, q, 2);
            break;
        case Method::dctsvd:
            fm = dctsvd_feature_matrix(gray, b, q);
            break;
        case Method::dwtsvd:
            fm = sv_feature_matrix(haar_dwt(gray).ll, b, q, 2);
            break;
    }
    result.timings.feature_s = seconds_since(t0);
    result.rows = fm.row_count();

    t0 = Clock::now();
    LexSortResult sorted = lex_sort(fm);
    fm.values.clear();
    fm.values.shrink_to_fit();
    result.timings.sort_s = seconds_since(t0);

    t0 = Clock::now();
    std::vector<MatchPair> candidates =
        candidate_pairs(sorted.sorted, cfg.sort_window, cfg.overlap_guard);
    result.timings.match_s = seconds_since(t0);

    t0 = Clock::now();
    const ShiftHistogram hist = shift_histogram(candidates, sorted.sorted.scale);
    result.accepted = filter_by_shift(candidates, hist, threshold);
    for (const auto& [key, count] : hist.bins)
        if (count >= threshold) result.bins.push_back({key.first, key.second, count});
    result.timings.filter_s = seconds_since(t0);

    result.meta = std::move(sorted.sorted);
    result.meta.values.clear();
    result.meta.values.shrink_to_fit();
    result.timings.total_s = seconds_since(total0);
    return result;
}

long long distinct_origin_count(const std::vector<MatchPair>& pairs) {
    std::vector<Point> origins;
    origins.reserve(pairs.size() * 2);
    for (const MatchPair& p : pairs) {
        origins.push_back(p.a);
        origins.push_back(p.b);
    }
    std::sort(origins.begin(), origins.end(),
              [](Point a, Point b) { return raster_less(a, b); });
    origins.erase(std::unique(origins.begin(), origins.end()), origins.end());
    return static_cast<long long>(origins.size());
}

void check_image_size(const GrayImage& img, const DetectorConfig& cfg) {
    const int need = is_dwt_family(cfg.method) ? 2 * cfg.block_size : cfg.block_size;
    if (img.width < need || img.height < need)
        throw InvalidInput("image " + std::to_string(img.width) + "x" +
                           std::to_string(img.height) + " too small for method " +
                           method_name(cfg.method) + " with block size " +
                           std::to_string(cfg.block_size));
}

}  // namespace

std::string method_name(Method m) {
    switch (m) {
        case Method::sobm: return "sobm";
        case Method::dct: return "dct";
        case Method::pca: return "pca";
        case Method::svd: return "svd";
        case Method::dwt: return "dwt";
        case Method::dctsvd: return "dctsvd";
        case Method::dwtsvd: return "dwtsvd";
    }
    return "?";
}

Method parse_method(const std::string& name) {
    for (Method m : all_methods())
        if (method_name(m) == name) return m;
    throw InvalidInput("unknown method: " + name);
}

const std::vector<Method>& all_methods() {
    static const std::vector<Method> methods = {Method::sobm, Method::dct,    Method::pca,
                                                Method::svd,  Method::dwt,    Method::dctsvd,
                                                Method::dwtsvd};
    return methods;
}

bool is_dwt_family(Method m) {
    return m == Method::dwt || m == Method::dwtsvd;
}

bool is_dct_family(Method m) {
    return m == Method::dct || m == Method::dctsvd;
}

double effective_quant_step(const DetectorConfig& cfg) {
    if (cfg.quant_step > 0.0) return cfg.quant_step;
    return (cfg.method == Method::sobm || cfg.method == Method::dwt) ? 1.0 : 2.0;
}

long long effective_shift_threshold(const DetectorConfig& cfg) {
    if (is_dwt_family(cfg.method)) return std::max(1, cfg.shift_threshold / 4);
    return cfg.shift_threshold;
}

void validate_config(const DetectorConfig& cfg) {
    if (cfg.block_size < 2)
        throw InvalidBlockSize("block size must be at least 2");
    if (is_dct_family(cfg.method) && cfg.block_size % 2 != 0)
        throw InvalidBlockSize("block size must be even for " + method_name(cfg.method));
    if (cfg.quant_step < 0.0) throw InvalidInput("quant step must be positive (or 0 for default)");
    if (cfg.shift_threshold < 1) throw InvalidInput("shift threshold must be >= 1");
    if (cfg.sort_window < 1) throw InvalidInput("sort window must be >= 1");
}

DetectionReport detect_gray(const GrayImage& img, const DetectorConfig& cfg) {
    validate_config(cfg);
    check_image_size(img, cfg);

    const auto total0 = Clock::now();
    PipelineResult r = run_pipeline(img, cfg);

    DetectionReport report;
    report.config = cfg;
    report.feature_dim = r.meta.dim;
    report.feature_rows = r.rows;
    report.accepted_pair_count = static_cast<long long>(r.accepted.size());
    report.tampering_detected = !r.accepted.empty();
    report.matched_block_count = distinct_origin_count(r.accepted);
    report.accepted_bins = std::move(r.bins);
    report.mask = build_mask(r.accepted, r.meta, img.width, img.height);
    report.accepted_pairs = std::move(r.accepted);
    report.timings = r.timings;
    report.timings.total_s = seconds_since(total0);
    return report;
}

DetectionReport detect(const RgbImage& img, const DetectorConfig& cfg) {
    validate_config(cfg);
    if (cfg.color_mode == ColorMode::gray) return detect_gray(to_gray(img), cfg);

    // Per-channel mode: full pipeline on each plane, masks OR-ed together.
    const auto total0 = Clock::now();
    const std::array<GrayImage, 3> planes = split_channels(img);
    static const char* kNames[3] = {"r", "g", "b"};

    DetectionReport report;
    report.config = cfg;
    report.mask = DetectionMask::empty(img.width, img.height);
    std::map<std::pair<int, int>, long long> merged_bins;
    std::vector<MatchPair> all_pairs;

    for (int c = 0; c < 3; ++c) {
        check_image_size(planes[c], cfg);
        PipelineResult r = run_pipeline(planes[c], cfg);
        report.feature_dim = r.meta.dim;
        report.feature_rows = r.rows;

        ChannelReport ch;
        ch.channel = kNames[c];
        ch.accepted_pair_count = static_cast<long long>(r.accepted.size());
        ch.matched_block_count = distinct_origin_count(r.accepted);
        ch.accepted_bins = r.bins;
        report.channels.push_back(std::move(ch));

        const DetectionMask mask = build_mask(r.accepted, r.meta, img.width, img.height);
        for (std::size_t i = 0; i < mask.labels.size(); ++i)
            report.mask.labels[i] = std::max(report.mask.labels[i], mask.labels[i]);
        for (const ShiftBin& bin : r.bins) merged_bins[{bin.dx, bin.dy}] += bin.count;
        all_pairs.insert(all_pairs.end(), r.accepted.begin(), r.accepted.end());

        report.timings.feature_s += r.timings.feature_s;
        report.timings.sort_s += r.timings.sort_s;
        report.timings.match_s += r.timings.match_s;
        report.timings.filter_s += r.timings.filter_s;
    }

    std::sort(all_pairs.begin(), all_pairs.end(), [](const MatchPair& p, const MatchPair& q) {
        if (p.a.y != q.a.y) return p.a.y < q.a.y;
        if (p.a.x != q.a.x) return p.a.x < q.a.x;
        if (p.b.y != q.b.y) return p.b.y < q.b.y;
        return p.b.x < q.b.x;
    });
    all_pairs.erase(std::unique(all_pairs.begin(), all_pairs.end()), all_pairs.end());

    report.accepted_pair_count = static_cast<long long>(all_pairs.size());
    report.tampering_detected = !all_pairs.empty();
    report.matched_block_count = distinct_origin_count(all_pairs);
    report.accepted_pairs = std::move(all_pairs);
    for (const auto& [key, count] : merged_bins)
        report.accepted_bins.push_back({key.first, key.second, count});
    report.timings.total_s = seconds_since(total0);
    return report;
}

int min_detectable_clone(const DetectorConfig& cfg) {
    return is_dwt_family(cfg.method) ? 2 * cfg.block_size : cfg.block_size;
}

}  // namespace clonedetect
