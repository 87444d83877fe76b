#pragma once

#include <string>
#include <vector>

#include "clonedetect/detect.hpp"
#include "clonedetect/image.hpp"

namespace clonedetect::cli {

/// One cell of the comparison table: one image run with one method,
/// times are medians over the configured repeat count.
struct BenchRow {
    std::string image;
    std::string method;
    int block_size = 0;
    long long matched_blocks = 0;
    double total_s = 0.0;
    double feature_s = 0.0;
    double sort_s = 0.0;
    double match_s = 0.0;
    double filter_s = 0.0;

    friend bool operator==(const BenchRow&, const BenchRow&) = default;
};

std::string bench_csv_header();
std::string to_csv_line(const BenchRow& row);      // lossless (%.17g doubles)
BenchRow parse_csv_line(const std::string& line);  // throws FormatError

struct BenchInput {
    std::string label;
    RgbImage image;
};

/// Runs every method on every input `repeat` times (sequentially, to keep
/// timings quiet) and reports median stage times per cell.
std::vector<BenchRow> run_bench(const std::vector<BenchInput>& inputs,
                                const std::vector<Method>& methods, int block_size,
                                int repeat);

/// Text table, images down, methods across, each cell "t=<s> n=<blocks>".
std::string format_bench_table(const std::vector<BenchRow>& rows);

}  // namespace clonedetect::cli
