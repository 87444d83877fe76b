#include "report_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "clonedetect/errors.hpp"

namespace clonedetect::cli {

namespace {

nlohmann::ordered_json bins_to_json(const std::vector<ShiftBin>& bins) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const ShiftBin& b : bins)
        arr.push_back({{"dx", b.dx}, {"dy", b.dy}, {"count", b.count}});
    return arr;
}

}  // namespace

nlohmann::ordered_json report_to_json(const DetectionReport& report,
                                      const std::string& mask_path, bool deterministic) {
    const DetectorConfig& cfg = report.config;
    nlohmann::ordered_json j;
    j["method"] = method_name(cfg.method);
    j["config"] = {
        {"block_size", cfg.block_size},
        {"quant_step", effective_quant_step(cfg)},
        {"shift_threshold", cfg.shift_threshold},
        {"effective_shift_threshold", effective_shift_threshold(cfg)},
        {"sort_window", cfg.sort_window},
        {"overlap_guard", cfg.overlap_guard},
        {"color_mode", cfg.color_mode == ColorMode::gray ? "gray" : "per-channel"},
    };
    j["feature_dim"] = report.feature_dim;
    j["feature_rows"] = report.feature_rows;
    j["tampering_detected"] = report.tampering_detected;
    j["matched_block_count"] = report.matched_block_count;
    j["accepted_pair_count"] = report.accepted_pair_count;
    j["shift_bins"] = bins_to_json(report.accepted_bins);
    const StageTimings t = deterministic ? StageTimings{} : report.timings;
    j["timings"] = {
        {"feature", t.feature_s}, {"sort", t.sort_s},     {"match", t.match_s},
        {"filter", t.filter_s},   {"total", t.total_s},
    };
    j["mask_path"] = mask_path;
    if (!report.channels.empty()) {
        nlohmann::ordered_json channels = nlohmann::ordered_json::array();
        for (const ChannelReport& ch : report.channels) {
            channels.push_back({
                {"channel", ch.channel},
                {"matched_block_count", ch.matched_block_count},
                {"accepted_pair_count", ch.accepted_pair_count},
                {"shift_bins", bins_to_json(ch.accepted_bins)},
            });
        }
        j["channels"] = std::move(channels);
    }
    return j;
}

void write_report_json(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write report: " + path.string());
    out << j.dump(2) << '\n';
}

RgbImage render_mask_overlay(const GrayImage& base, const DetectionMask& mask) {
    RgbImage out;
    out.width = base.width;
    out.height = base.height;
    const std::size_t n = static_cast<std::size_t>(base.width) * base.height;
    for (auto& plane : out.planes) plane.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        switch (static_cast<MaskLabel>(mask.labels[i])) {
            case MaskLabel::source:
                out.planes[0][i] = 255;
                out.planes[1][i] = 140;
                out.planes[2][i] = 0;
                break;
            case MaskLabel::target:
                out.planes[0][i] = 0;
                out.planes[1][i] = 160;
                out.planes[2][i] = 160;
                break;
            case MaskLabel::none: {
                const long v = std::lround(base.pixels[i]);
                const std::uint8_t g = static_cast<std::uint8_t>(std::clamp(v, 0L, 255L));
                out.planes[0][i] = g;
                out.planes[1][i] = g;
                out.planes[2][i] = g;
                break;
            }
        }
    }
    return out;
}

}  // namespace clonedetect::cli
