#include "bench.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include "clonedetect/errors.hpp"

namespace clonedetect::cli {

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> csv_split(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (!end || *end != '\0' || s.empty()) throw FormatError("bad CSV number: " + s);
    return v;
}

long long parse_ll(const std::string& s) {
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (!end || *end != '\0' || s.empty()) throw FormatError("bad CSV integer: " + s);
    return v;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n == 0) return 0.0;
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::string bench_csv_header() {
    return "image,method,block_size,matched_blocks,total_s,feature_s,sort_s,match_s,filter_s";
}

std::string to_csv_line(const BenchRow& row) {
    std::ostringstream out;
    out << csv_escape(row.image) << ',' << csv_escape(row.method) << ',' << row.block_size
        << ',' << row.matched_blocks << ',' << format_double(row.total_s) << ','
        << format_double(row.feature_s) << ',' << format_double(row.sort_s) << ','
        << format_double(row.match_s) << ',' << format_double(row.filter_s);
    return out.str();
}

BenchRow parse_csv_line(const std::string& line) {
    const std::vector<std::string> f = csv_split(line);
    if (f.size() != 9) throw FormatError("bad CSV row: expected 9 fields");
    BenchRow row;
    row.image = f[0];
    row.method = f[1];
    row.block_size = static_cast<int>(parse_ll(f[2]));
    row.matched_blocks = parse_ll(f[3]);
    row.total_s = parse_double(f[4]);
    row.feature_s = parse_double(f[5]);
    row.sort_s = parse_double(f[6]);
    row.match_s = parse_double(f[7]);
    row.filter_s = parse_double(f[8]);
    return row;
}

std::vector<BenchRow> run_bench(const std::vector<BenchInput>& inputs,
                                const std::vector<Method>& methods, int block_size,
                                int repeat) {
    if (repeat < 1) throw InvalidInput("bench: repeat must be >= 1");
    std::vector<BenchRow> rows;
    for (const BenchInput& input : inputs) {
        for (Method m : methods) {
            DetectorConfig cfg;
            cfg.method = m;
            cfg.block_size = block_size;
            std::vector<double> total, feature, sort_t, match, filter;
            long long matched = 0;
            for (int k = 0; k < repeat; ++k) {
                const DetectionReport report = detect(input.image, cfg);
                matched = report.matched_block_count;
                total.push_back(report.timings.total_s);
                feature.push_back(report.timings.feature_s);
                sort_t.push_back(report.timings.sort_s);
                match.push_back(report.timings.match_s);
                filter.push_back(report.timings.filter_s);
            }
            rows.push_back({input.label, method_name(m), block_size, matched, median(total),
                            median(feature), median(sort_t), median(match), median(filter)});
        }
    }
    return rows;
}

std::string format_bench_table(const std::vector<BenchRow>& rows) {
    std::vector<std::string> images;
    std::vector<std::string> methods;
    std::map<std::pair<std::string, std::string>, const BenchRow*> cells;
    for (const BenchRow& row : rows) {
        if (std::find(images.begin(), images.end(), row.image) == images.end())
            images.push_back(row.image);
        if (std::find(methods.begin(), methods.end(), row.method) == methods.end())
            methods.push_back(row.method);
        cells[{row.image, row.method}] = &row;
    }

    auto cell_text = [&](const std::string& image, const std::string& method) -> std::string {
        const auto it = cells.find({image, method});
        if (it == cells.end()) return "-";
        char buf[64];
        std::snprintf(buf, sizeof buf, "t=%.4f n=%lld", it->second->total_s,
                      it->second->matched_blocks);
        return buf;
    };

    std::size_t img_w = std::string("image").size();
    for (const auto& s : images) img_w = std::max(img_w, s.size());
    std::vector<std::size_t> col_w(methods.size());
    for (std::size_t c = 0; c < methods.size(); ++c) {
        col_w[c] = methods[c].size();
        for (const auto& img : images) col_w[c] = std::max(col_w[c], cell_text(img, methods[c]).size());
    }

    std::ostringstream out;
    auto pad = [&](const std::string& s, std::size_t w) {
        out << s << std::string(w - s.size() + 2, ' ');
    };
    pad("image", img_w);
    for (std::size_t c = 0; c < methods.size(); ++c) pad(methods[c], col_w[c]);
    out << '\n';
    for (const auto& img : images) {
        pad(img, img_w);
        for (std::size_t c = 0; c < methods.size(); ++c) pad(cell_text(img, methods[c]), col_w[c]);
        out << '\n';
    }
    return out.str();
}

}  // namespace clonedetect::cli
