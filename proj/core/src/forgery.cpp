#include "clonedetect/forgery.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include "clonedetect/errors.hpp"

namespace clonedetect {

namespace {

// splitmix64: tiny, seed-stable across platforms, good enough for fixtures.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    double next_byte() { return static_cast<double>(next() >> 56); }
};

bool inside(const Rect& r, int width, int height) {
    return r.x >= 0 && r.y >= 0 && r.w >= 1 && r.h >= 1 && r.x + r.w <= width &&
           r.y + r.h <= height;
}

// Shape mask over the recipe's w x h patch; rect keeps everything.
bool in_shape(const ForgerySpec& spec, int i, int j) {
    if (spec.shape == CloneShape::rect) return true;
    const double rx = spec.src.w / 2.0;
    const double ry = spec.src.h / 2.0;
    const double nx = (i + 0.5 - rx) / rx;
    const double ny = (j + 0.5 - ry) / ry;
    return nx * nx + ny * ny <= 1.0;
}

}  // namespace

std::string texture_name(Texture t) {
    switch (t) {
        case Texture::noise: return "noise";
        case Texture::gradient: return "gradient";
        case Texture::tiled: return "tiled";
    }
    return "?";
}

Texture parse_texture(const std::string& name) {
    if (name == "noise") return Texture::noise;
    if (name == "gradient") return Texture::gradient;
    if (name == "tiled") return Texture::tiled;
    throw InvalidInput("unknown texture: " + name);
}

std::string shape_name(CloneShape s) {
    return s == CloneShape::rect ? "rect" : "ellipse";
}

CloneShape parse_shape(const std::string& name) {
    if (name == "rect") return CloneShape::rect;
    if (name == "ellipse") return CloneShape::ellipse;
    throw InvalidInput("unknown shape: " + name);
}

GrayImage synth_base(int width, int height, std::uint64_t seed, Texture texture,
                     int tile_period) {
    if (width < 16 || height < 16)
        throw InvalidInput("synth_base: dimensions must be at least 16");
    GrayImage img = GrayImage::zeros(width, height);
    SplitMix64 rng(seed);
    switch (texture) {
        case Texture::noise:
            for (double& p : img.pixels) p = rng.next_byte();
            break;
        case Texture::gradient: {
            const double scale = 255.0 / (width + height - 2);
            for (int y = 0; y < height; ++y)
                for (int x = 0; x < width; ++x)
                    img.at(x, y) = static_cast<double>(std::llround((x + y) * scale));
            break;
        }
        case Texture::tiled: {
            if (tile_period < 2 || tile_period > std::min(width, height))
                throw InvalidInput("synth_base: tile period out of range");
            std::vector<double> tile(static_cast<std::size_t>(tile_period) * tile_period);
            for (double& p : tile) p = rng.next_byte();
            for (int y = 0; y < height; ++y)
                for (int x = 0; x < width; ++x)
                    img.at(x, y) =
                        tile[static_cast<std::size_t>(y % tile_period) * tile_period +
                             x % tile_period];
            break;
        }
    }
    return img;
}

ForgedImage plant_clone(const GrayImage& img, const ForgerySpec& spec) {
    if (!inside(spec.src, img.width, img.height))
        throw InvalidSpec("plant_clone: source rectangle out of bounds");
    if (!inside(spec.dst_rect(), img.width, img.height))
        throw InvalidSpec("plant_clone: destination rectangle out of bounds");
    if (spec.src.intersects(spec.dst_rect()))
        throw InvalidSpec("plant_clone: source and destination overlap");

    ForgedImage out;
    out.image = img;
    out.truth.mask = DetectionMask::empty(img.width, img.height);
    out.truth.shift = spec.shift();

    for (int j = 0; j < spec.src.h; ++j) {
        for (int i = 0; i < spec.src.w; ++i) {
            if (!in_shape(spec, i, j)) continue;
            const double sv = img.at(spec.src.x + i, spec.src.y + j);
            double tv = sv + spec.intensity_offset;
            const double clamped = std::clamp(tv, 0.0, 255.0);
            if (clamped != tv) ++out.truth.clamped_pixels;
            out.image.at(spec.dst.x + i, spec.dst.y + j) = clamped;
            out.truth.mask.set(spec.src.x + i, spec.src.y + j, MaskLabel::source);
            out.truth.mask.set(spec.dst.x + i, spec.dst.y + j, MaskLabel::target);
        }
    }
    return out;
}

Score score_mask(const DetectionMask& detected, const GroundTruth& truth) {
    if (detected.width != truth.mask.width || detected.height != truth.mask.height)
        throw InvalidInput("score_mask: dimensions differ");
    long long tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < detected.labels.size(); ++i) {
        const bool d = detected.labels[i] != 0;
        const bool t = truth.mask.labels[i] != 0;
        tp += d && t;
        fp += d && !t;
        fn += !d && t;
    }
    Score s;
    s.pixel_precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / (tp + fp);
    s.pixel_recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / (tp + fn);
    s.pixel_f1 = s.pixel_precision + s.pixel_recall == 0.0
                     ? 0.0
                     : 2.0 * s.pixel_precision * s.pixel_recall /
                           (s.pixel_precision + s.pixel_recall);
    return s;
}

double score_pairs(const std::vector<MatchPair>& accepted, int block_size, int scale,
                   const GroundTruth& truth) {
    const int w = truth.mask.width;
    const int h = truth.mask.height;
    const int side = block_size * scale;

    // prefix sums for O(1) "is this footprint all source / all target"
    std::vector<long long> src_sum(static_cast<std::size_t>(w + 1) * (h + 1), 0);
    std::vector<long long> tgt_sum(static_cast<std::size_t>(w + 1) * (h + 1), 0);
    auto at = [&](std::vector<long long>& v, int x, int y) -> long long& {
        return v[static_cast<std::size_t>(y) * (w + 1) + x];
    };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const MaskLabel l = truth.mask.at(x, y);
            at(src_sum, x + 1, y + 1) = (l == MaskLabel::source) + at(src_sum, x, y + 1) +
                                        at(src_sum, x + 1, y) - at(src_sum, x, y);
            at(tgt_sum, x + 1, y + 1) = (l == MaskLabel::target) + at(tgt_sum, x, y + 1) +
                                        at(tgt_sum, x + 1, y) - at(tgt_sum, x, y);
        }
    }
    auto rect_full = [&](std::vector<long long>& v, int x, int y) {
        if (x < 0 || y < 0 || x + side > w || y + side > h) return false;
        const long long total = at(v, x + side, y + side) - at(v, x, y + side) -
                                at(v, x + side, y) + at(v, x, y);
        return total == static_cast<long long>(side) * side;
    };

    std::set<std::pair<std::pair<int, int>, std::pair<int, int>>> accepted_set;
    for (const MatchPair& p : accepted)
        accepted_set.insert({{p.a.x * scale, p.a.y * scale}, {p.b.x * scale, p.b.y * scale}});

    long long total = 0, recovered = 0;
    const Shift shift = truth.shift;
    for (int y = 0; y + side <= h; y += scale) {
        for (int x = 0; x + side <= w; x += scale) {
            if (!rect_full(src_sum, x, y)) continue;
            if (!rect_full(tgt_sum, x + shift.dx, y + shift.dy)) continue;
            ++total;
            const MatchPair want = make_pair({x / scale, y / scale},
                                             {(x + shift.dx) / scale, (y + shift.dy) / scale});
            if (shift.dx % scale == 0 && shift.dy % scale == 0 &&
                accepted_set.count({{want.a.x * scale, want.a.y * scale},
                                    {want.b.x * scale, want.b.y * scale}}))
                ++recovered;
        }
    }
    return total == 0 ? 0.0 : static_cast<double>(recovered) / static_cast<double>(total);
}

Score score_detection(const DetectionMask& detected, const std::vector<MatchPair>& accepted,
                      int block_size, int scale, const GroundTruth& truth) {
    Score s = score_mask(detected, truth);
    s.pair_recall = score_pairs(accepted, block_size, scale, truth);
    return s;
}

void write_ground_truth(const std::filesystem::path& path, const ForgerySpec& spec,
                        const GroundTruth& truth, const std::string& texture) {
    nlohmann::ordered_json j;
    j["width"] = truth.mask.width;
    j["height"] = truth.mask.height;
    j["texture"] = texture;
    j["spec"] = {
        {"src", {spec.src.x, spec.src.y, spec.src.w, spec.src.h}},
        {"dst", {spec.dst.x, spec.dst.y}},
        {"offset", spec.intensity_offset},
        {"shape", shape_name(spec.shape)},
        {"seed", spec.seed},
    };
    j["shift"] = {truth.shift.dx, truth.shift.dy};
    j["clamped_pixels"] = truth.clamped_pixels;

    nlohmann::ordered_json runs = nlohmann::ordered_json::array();
    std::size_t i = 0;
    while (i < truth.mask.labels.size()) {
        const std::uint8_t label = truth.mask.labels[i];
        std::size_t run = 1;
        while (i + run < truth.mask.labels.size() && truth.mask.labels[i + run] == label) ++run;
        runs.push_back({label, run});
        i += run;
    }
    j["mask_rle"] = std::move(runs);

    std::ofstream out(path);
    if (!out) throw IoError("cannot write ground truth: " + path.string());
    out << j.dump(2) << '\n';
}

GroundTruthFile load_ground_truth(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read ground truth: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("bad ground truth JSON: " + std::string(e.what()));
    }
    try {
        GroundTruthFile out;
        out.texture = j.value("texture", std::string("noise"));
        const auto& spec = j.at("spec");
        const auto& src = spec.at("src");
        out.spec.src = {src.at(0), src.at(1), src.at(2), src.at(3)};
        out.spec.dst = {spec.at("dst").at(0), spec.at("dst").at(1)};
        out.spec.intensity_offset = spec.at("offset");
        out.spec.shape = parse_shape(spec.at("shape"));
        out.spec.seed = spec.at("seed");
        out.truth.shift = {j.at("shift").at(0), j.at("shift").at(1)};
        out.truth.clamped_pixels = j.at("clamped_pixels");
        out.truth.mask = DetectionMask::empty(j.at("width"), j.at("height"));
        std::size_t i = 0;
        for (const auto& run : j.at("mask_rle")) {
            const std::uint8_t label = run.at(0);
            const std::size_t len = run.at(1);
            if (i + len > out.truth.mask.labels.size())
                throw FormatError("ground truth mask RLE overruns dimensions");
            std::fill_n(out.truth.mask.labels.begin() + static_cast<long>(i), len, label);
            i += len;
        }
        if (i != out.truth.mask.labels.size())
            throw FormatError("ground truth mask RLE short of dimensions");
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("bad ground truth JSON: " + std::string(e.what()));
    }
}

}  // namespace clonedetect
