#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "clonedetect/detect.hpp"
#include "clonedetect/image.hpp"

namespace clonedetect::cli {

/// Detection report as ordered JSON (stable key order for golden files).
/// `deterministic` zeroes the timing fields so two runs on the same input
/// produce byte-identical documents.
nlohmann::ordered_json report_to_json(const DetectionReport& report,
                                      const std::string& mask_path, bool deterministic);

void write_report_json(const std::filesystem::path& path, const nlohmann::ordered_json& j);

/// Mask rendering: untouched pixels pass through as grayscale, detected
/// source blocks turn orange (255,140,0), targets bluish green (0,160,160).
RgbImage render_mask_overlay(const GrayImage& base, const DetectionMask& mask);

}  // namespace clonedetect::cli
