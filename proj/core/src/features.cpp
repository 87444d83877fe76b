#include "clonedetect/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "clonedetect/errors.hpp"
#include "clonedetect/parallel.hpp"
#include "feature_impl.hpp"
#include "sym_jacobi.hpp"

namespace clonedetect {

namespace {

void require_finite(std::span<const double> values, const char* what) {
    for (double v : values)
        if (!std::isfinite(v)) throw NumericalError(std::string(what) + ": non-finite input");
}

}  // namespace

DctPlan::DctPlan(int n) : size(n), basis(static_cast<std::size_t>(n) * n) {
    if (n < 2) throw InvalidBlockSize("DCT plan needs n >= 2");
    const double inv_sqrt_n = std::sqrt(1.0 / n);
    const double scale = std::sqrt(2.0 / n);
    for (int u = 0; u < n; ++u) {
        const double alpha = u == 0 ? inv_sqrt_n : scale;
        for (int x = 0; x < n; ++x)
            basis[static_cast<std::size_t>(u) * n + x] =
                alpha * std::cos((2.0 * x + 1.0) * u * std::numbers::pi / (2.0 * n));
    }
}

CoeffBlock dct2(const Block& block, const DctPlan& plan) {
    if (block.size != plan.size) throw InvalidBlockSize("dct2: block does not match plan");
    require_finite(block.samples, "dct2");
    CoeffBlock out;
    out.size = block.size;
    out.coeffs.resize(block.samples.size());
    std::vector<double> tmp(block.samples.size());
    detail::dct2_window(block.samples.data(), block.size, plan, tmp.data(), out.coeffs.data());
    return out;
}

CoeffBlock dct2(const Block& block) {
    return dct2(block, DctPlan(block.size));
}

DwtQuad haar_dwt(const GrayImage& img) {
    if (img.width < 2 || img.height < 2)
        throw InvalidInput("haar_dwt: image must be at least 2x2");
    const int hw = img.width / 2;
    const int hh = img.height / 2;
    DwtQuad q;
    q.ll = GrayImage::zeros(hw, hh, PixelDomain::transform);
    q.lh = GrayImage::zeros(hw, hh, PixelDomain::transform);
    q.hl = GrayImage::zeros(hw, hh, PixelDomain::transform);
    q.hh = GrayImage::zeros(hw, hh, PixelDomain::transform);
    for (int j = 0; j < hh; ++j) {
        const double* r0 = img.pixels.data() + static_cast<std::size_t>(2 * j) * img.width;
        const double* r1 = r0 + img.width;
        for (int i = 0; i < hw; ++i) {
            const double a = r0[2 * i], b = r0[2 * i + 1];
            const double c = r1[2 * i], d = r1[2 * i + 1];
            q.ll.at(i, j) = ((a + b) + (c + d)) * 0.5;
            q.lh.at(i, j) = ((a - b) + (c - d)) * 0.5;  // horizontal detail
            q.hl.at(i, j) = ((a + b) - (c + d)) * 0.5;  // vertical detail
            q.hh.at(i, j) = ((a - b) - (c - d)) * 0.5;
        }
    }
    return q;
}

PcaBasis pca_fit(const Matrix& samples, int k) {
    const int n = samples.rows;
    const int d = samples.cols;
    if (n < 2) throw InvalidInput("pca_fit: need at least 2 samples");
    if (k < 1 || k > d) throw InvalidInput("pca_fit: k out of range");
    require_finite(samples.data, "pca_fit");

    // Two-pass moments, accumulated per fixed-size chunk with compensated
    // sums and combined in chunk order so the result is independent of the
    // worker count.
    const long long chunk_count = (n + kParallelChunk - 1) / kParallelChunk;
    std::vector<std::vector<double>> mean_partials(static_cast<std::size_t>(chunk_count));
    parallel_chunks(n, [&](long long ci, long long begin, long long end) {
        std::vector<double> sum(static_cast<std::size_t>(d), 0.0);
        std::vector<double> comp(static_cast<std::size_t>(d), 0.0);
        for (long long r = begin; r < end; ++r) {
            const double* row = samples.data.data() + static_cast<std::size_t>(r) * d;
            for (int c = 0; c < d; ++c) {
                const double y = row[c] - comp[c];
                const double t = sum[c] + y;
                comp[c] = (t - sum[c]) - y;
                sum[c] = t;
            }
        }
        mean_partials[static_cast<std::size_t>(ci)] = std::move(sum);
    });
    std::vector<double> mean(static_cast<std::size_t>(d), 0.0);
    for (const auto& part : mean_partials)
        for (int c = 0; c < d; ++c) mean[c] += part[c];
    for (int c = 0; c < d; ++c) mean[c] /= n;

    const std::size_t tri = static_cast<std::size_t>(d) * (d + 1) / 2;
    std::vector<std::vector<double>> cov_partials(static_cast<std::size_t>(chunk_count));
    parallel_chunks(n, [&](long long ci, long long begin, long long end) {
        std::vector<double> sum(tri, 0.0);
        std::vector<double> comp(tri, 0.0);
        std::vector<double> centered(static_cast<std::size_t>(d));
        for (long long r = begin; r < end; ++r) {
            const double* row = samples.data.data() + static_cast<std::size_t>(r) * d;
            for (int c = 0; c < d; ++c) centered[c] = row[c] - mean[c];
            std::size_t t = 0;
            for (int i = 0; i < d; ++i) {
                const double ci_v = centered[i];
                for (int j = i; j < d; ++j, ++t) {
                    const double y = ci_v * centered[j] - comp[t];
                    const double s2 = sum[t] + y;
                    comp[t] = (s2 - sum[t]) - y;
                    sum[t] = s2;
                }
            }
        }
        cov_partials[static_cast<std::size_t>(ci)] = std::move(sum);
    });
    Matrix cov(d, d);
    {
        std::vector<double> acc(tri, 0.0);
        for (const auto& part : cov_partials)
            for (std::size_t t = 0; t < tri; ++t) acc[t] += part[t];
        std::size_t t = 0;
        const double inv = 1.0 / (n - 1);
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j, ++t) {
                cov.at(i, j) = acc[t] * inv;
                cov.at(j, i) = cov.at(i, j);
            }
    }

    EigenDecomposition eig = symmetric_eigen(std::move(cov));

    PcaBasis basis;
    basis.dim = d;
    basis.k = k;
    basis.mean = std::move(mean);
    basis.components = Matrix(k, d);
    basis.variances.resize(k);
    for (int i = 0; i < k; ++i) {
        basis.variances[i] = std::max(0.0, eig.values[i]);
        for (int c = 0; c < d; ++c) basis.components.at(i, c) = eig.vectors.at(c, i);
    }
    return basis;
}

std::vector<std::int64_t> quantize(std::span<const double> values, double q) {
    if (!(q > 0.0)) throw InvalidInput("quantize: step must be positive");
    const double inv_q = 1.0 / q;
    std::vector<std::int64_t> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = quantize_value(values[i], inv_q);
    return out;
}

FeatureVector dct_features(const Block& block, double quant_step) {
    if (block.size % 2 != 0)
        throw InvalidBlockSize("dct_features: block size must be even, got " +
                               std::to_string(block.size));
    if (!(quant_step > 0.0)) throw InvalidInput("dct_features: quant step must be positive");
    const DctPlan plan(block.size);
    const CoeffBlock coeffs = dct2(block, plan);
    const int half = block.size / 2;
    const double inv_q = 1.0 / quant_step;
    FeatureVector fv;
    fv.origin = block.origin;
    fv.values.resize(static_cast<std::size_t>(half) * half);
    std::size_t i = 0;
    for (int u = 0; u < half; ++u)
        for (int v = 0; v < half; ++v, ++i)
            fv.values[i] = quantize_value(coeffs.at(u, v), inv_q);
    fv.values[0] = 0;  // DC carries the block mean; pinning it buys offset invariance
    return fv;
}

std::vector<double> block_singular_values(const Block& block) {
    require_finite(block.samples, "block_singular_values");
    std::vector<double> out(static_cast<std::size_t>(block.size));
    batch_singular_values(block.samples, block.size, out);
    return out;
}

void batch_singular_values(std::span<const double> blocks, int block_size,
                           std::span<double> out) {
    if (block_size < 2) throw InvalidBlockSize("batch_singular_values: block size must be >= 2");
    const std::size_t per_block = static_cast<std::size_t>(block_size) * block_size;
    if (blocks.size() % per_block != 0 || out.size() != blocks.size() / per_block * block_size)
        throw InvalidInput("batch_singular_values: buffer sizes inconsistent");
    const std::size_t count = blocks.size() / per_block;
    detail::SymJacobiBatch batch(block_size);
    std::size_t done = 0;
    while (done < count) {
        const int lanes =
            static_cast<int>(std::min<std::size_t>(detail::SymJacobiBatch::kLanes, count - done));
        for (int l = 0; l < lanes; ++l)
            batch.load_gram_from_samples(blocks.data() + (done + l) * per_block, l);
        batch.run(lanes);
        for (int l = 0; l < lanes; ++l)
            batch.extract_singular_values(l, out.data() + (done + l) * block_size);
        done += lanes;
    }
}

FeatureVector svd_features(const Block& block, double quant_step) {
    if (!(quant_step > 0.0)) throw InvalidInput("svd_features: quant step must be positive");
    const std::vector<double> sigma = block_singular_values(block);
    FeatureVector fv;
    fv.origin = block.origin;
    fv.values = quantize(sigma, quant_step);
    return fv;
}

FeatureVector pca_features(const Block& block, const PcaBasis& basis, double quant_step) {
    if (static_cast<int>(block.samples.size()) != basis.dim)
        throw InvalidInput("pca_features: block dimension does not match basis");
    if (!(quant_step > 0.0)) throw InvalidInput("pca_features: quant step must be positive");
    require_finite(block.samples, "pca_features");

    // Center on the population mean, then drop the uniform-brightness
    // component of the residual before projecting.
    std::vector<double> centered(block.samples.size());
    double residual_mean = 0.0;
    for (std::size_t i = 0; i < centered.size(); ++i) {
        centered[i] = block.samples[i] - basis.mean[i];
        residual_mean += centered[i];
    }
    residual_mean /= static_cast<double>(centered.size());
    for (double& v : centered) v -= residual_mean;

    const double inv_q = 1.0 / quant_step;
    FeatureVector fv;
    fv.origin = block.origin;
    fv.values.resize(static_cast<std::size_t>(basis.k));
    for (int i = 0; i < basis.k; ++i) {
        double dot = 0.0;
        const double* comp = basis.components.data.data() + static_cast<std::size_t>(i) * basis.dim;
        for (int c = 0; c < basis.dim; ++c) dot += centered[c] * comp[c];
        fv.values[i] = quantize_value(dot, inv_q);
    }
    return fv;
}

}  // namespace clonedetect
