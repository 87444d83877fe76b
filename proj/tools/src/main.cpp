#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bench.hpp"
#include "clonedetect/detect.hpp"
#include "clonedetect/errors.hpp"
#include "clonedetect/forgery.hpp"
#include "clonedetect/image_io.hpp"
#include "report_io.hpp"

namespace {

using namespace clonedetect;

struct ParsedSize {
    int w = 0, h = 0;
};

ParsedSize parse_size(const std::string& s) {
    ParsedSize out;
    char sep = 0;
    std::istringstream in(s);
    if (!(in >> out.w >> sep >> out.h) || (sep != 'x' && sep != 'X') || !in.eof() ||
        out.w <= 0 || out.h <= 0)
        throw InvalidInput("bad --size, expected WxH: " + s);
    return out;
}

std::vector<int> parse_ints(const std::string& s, std::size_t n, const char* what) {
    std::vector<int> out;
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stoi(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw InvalidInput(std::string("bad ") + what + ": " + s);
        }
    }
    if (out.size() != n) throw InvalidInput(std::string("bad ") + what + ": " + s);
    return out;
}

struct DetectArgs {
    std::string method;
    int block_size = 4;
    double quant_step = 0.0;
    int shift_threshold = 100;
    int sort_window = 1;
    bool no_overlap_guard = false;
    bool per_channel = false;
    bool deterministic = false;
    std::string out_mask;
    std::string out_report;
    std::string input;
};

int run_detect(const DetectArgs& args) {
    DetectorConfig cfg;
    cfg.method = parse_method(args.method);
    cfg.block_size = args.block_size;
    cfg.quant_step = args.quant_step;
    cfg.shift_threshold = args.shift_threshold;
    cfg.sort_window = args.sort_window;
    cfg.overlap_guard = !args.no_overlap_guard;
    cfg.color_mode = args.per_channel ? ColorMode::per_channel : ColorMode::gray;
    validate_config(cfg);

    const RgbImage img = load_image(args.input);
    const int min_clone = min_detectable_clone(cfg);
    if (img.width < 4 * min_clone || img.height < 4 * min_clone)
        std::cerr << "note: " << method_name(cfg.method) << " at block size " << cfg.block_size
                  << " cannot represent clones smaller than " << min_clone << "x" << min_clone
                  << " px\n";
    const DetectionReport report = detect(img, cfg);

    const RgbImage overlay = cli::render_mask_overlay(to_gray(img), report.mask);
    save_png_rgb(overlay, args.out_mask);
    cli::write_report_json(args.out_report,
                           cli::report_to_json(report, args.out_mask, args.deterministic));

    std::cout << (report.tampering_detected ? "tampering detected" : "no tampering detected")
              << ": " << report.matched_block_count << " matched blocks, "
              << report.accepted_bins.size() << " shift bin(s)\n";
    return 0;
}

struct ForgeArgs {
    std::string size;
    std::uint64_t seed = 0;
    std::string texture = "noise";
    int tile_period = 16;
    std::string src;
    std::string dst;
    int offset = 0;
    std::string shape = "rect";
    std::string out;
};

int run_forge(const ForgeArgs& args) {
    const ParsedSize size = parse_size(args.size);
    const std::vector<int> src = parse_ints(args.src, 4, "--src (X,Y,W,H)");
    const std::vector<int> dst = parse_ints(args.dst, 2, "--dst (X,Y)");

    ForgerySpec spec;
    spec.src = {src[0], src[1], src[2], src[3]};
    spec.dst = {dst[0], dst[1]};
    spec.intensity_offset = args.offset;
    spec.shape = parse_shape(args.shape);
    spec.seed = args.seed;

    const GrayImage base =
        synth_base(size.w, size.h, args.seed, parse_texture(args.texture), args.tile_period);
    const ForgedImage forged = plant_clone(base, spec);

    save_png_gray(forged.image, args.out);
    write_ground_truth(args.out + ".json", spec, forged.truth, args.texture);
    std::cout << "wrote " << args.out << " and " << args.out << ".json (shift "
              << forged.truth.shift.dx << "," << forged.truth.shift.dy << ")\n";
    return 0;
}

struct BenchArgs {
    std::string methods = "all";
    int block_size = 4;
    int repeat = 5;
    std::string out_csv;
    std::vector<std::string> inputs;
};

std::vector<Method> parse_method_list(const std::string& arg) {
    if (arg == "all") return all_methods();
    std::vector<Method> out;
    std::istringstream in(arg);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(parse_method(item));
    if (out.empty()) throw InvalidInput("empty method list");
    return out;
}

int run_bench(const BenchArgs& args) {
    const std::vector<Method> methods = parse_method_list(args.methods);
    if (args.repeat < 1) throw InvalidInput("--repeat must be >= 1");

    std::vector<cli::BenchInput> inputs;
    for (const std::string& path : args.inputs)
        inputs.push_back({std::filesystem::path(path).filename().string(), load_image(path)});

    const std::vector<cli::BenchRow> rows =
        cli::run_bench(inputs, methods, args.block_size, args.repeat);

    if (!args.out_csv.empty()) {
        std::ofstream csv(args.out_csv, std::ios::binary);
        if (!csv) throw IoError("cannot write CSV: " + args.out_csv);
        csv << cli::bench_csv_header() << '\n';
        for (const cli::BenchRow& row : rows) csv << cli::to_csv_line(row) << '\n';
    }
    std::cout << cli::format_bench_table(rows);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"clonedetect: copy-move forgery detection toolkit"};
    app.require_subcommand(1);

    DetectArgs detect_args;
    CLI::App* detect_cmd = app.add_subcommand("detect", "locate duplicated regions in an image");
    detect_cmd->add_option("--method", detect_args.method,
                           "sobm|dct|pca|svd|dwt|dctsvd|dwtsvd")->required();
    detect_cmd->add_option("--block-size", detect_args.block_size, "block side b (default 4)");
    detect_cmd->add_option("--quant-step", detect_args.quant_step,
                           "descriptor quantization step (0 = method default)");
    detect_cmd->add_option("--shift-threshold", detect_args.shift_threshold,
                           "minimum pairs per shift vector (default 100)");
    detect_cmd->add_option("--sort-window", detect_args.sort_window,
                           "sorted-neighborhood window (default 1)");
    detect_cmd->add_flag("--no-overlap-guard", detect_args.no_overlap_guard,
                         "keep pairs with overlapping footprints");
    detect_cmd->add_flag("--per-channel", detect_args.per_channel,
                         "run on R, G, B separately and OR the masks");
    detect_cmd->add_flag("--deterministic-report", detect_args.deterministic,
                         "zero timing fields for byte-stable reports");
    detect_cmd->add_option("--out-mask", detect_args.out_mask, "mask PNG path")->required();
    detect_cmd->add_option("--out-report", detect_args.out_report, "report JSON path")->required();
    detect_cmd->add_option("input", detect_args.input, "input image (PNG or BMP)")->required();

    ForgeArgs forge_args;
    CLI::App* forge_cmd = app.add_subcommand("forge", "generate a cloned fixture + ground truth");
    forge_cmd->add_option("--size", forge_args.size, "image size WxH")->required();
    forge_cmd->add_option("--seed", forge_args.seed, "base image seed (default 0)");
    forge_cmd->add_option("--texture", forge_args.texture, "noise|gradient|tiled");
    forge_cmd->add_option("--tile-period", forge_args.tile_period,
                          "tile size for --texture tiled (default 16)");
    forge_cmd->add_option("--src", forge_args.src, "source rect X,Y,W,H")->required();
    forge_cmd->add_option("--dst", forge_args.dst, "destination origin X,Y")->required();
    forge_cmd->add_option("--offset", forge_args.offset,
                          "intensity offset added to the copy (default 0)");
    forge_cmd->add_option("--shape", forge_args.shape, "rect|ellipse");
    forge_cmd->add_option("--out", forge_args.out, "output PNG path")->required();

    BenchArgs bench_args;
    CLI::App* bench_cmd = app.add_subcommand("bench", "compare methods across images");
    bench_cmd->add_option("--methods", bench_args.methods, "all or comma list");
    bench_cmd->add_option("--block-size", bench_args.block_size, "block side b (default 4)");
    bench_cmd->add_option("--repeat", bench_args.repeat, "runs per cell, median reported");
    bench_cmd->add_option("--out-csv", bench_args.out_csv, "CSV output path");
    bench_cmd->add_option("inputs", bench_args.inputs, "input images")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (app.got_subcommand(detect_cmd)) return run_detect(detect_args);
        if (app.got_subcommand(forge_cmd)) return run_forge(forge_args);
        if (app.got_subcommand(bench_cmd)) return run_bench(bench_args);
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const InvalidBlockSize& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const InvalidSpec& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
