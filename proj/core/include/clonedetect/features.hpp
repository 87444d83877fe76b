#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "clonedetect/image.hpp"
#include "clonedetect/linalg.hpp"

namespace clonedetect {

/// Output of the 2-D DCT of one block.
struct CoeffBlock {
    int size = 0;
    std::vector<double> coeffs;  // size*size, row-major, (u, v) at [u*size + v]

    double at(int u, int v) const { return coeffs[static_cast<std::size_t>(u) * size + v]; }
    double& at(int u, int v) { return coeffs[static_cast<std::size_t>(u) * size + v]; }
};

/// Precomputed cosine basis for one block size. basis[u*n + x] =
/// alpha(u) * cos((2x+1) u pi / (2n)) with alpha(0) = sqrt(1/n) and
/// alpha(u>0) = sqrt(2/n), so the transform is orthonormal.
struct DctPlan {
    int size = 0;
    std::vector<double> basis;

    explicit DctPlan(int n);
};

/// Orthonormal 2-D DCT, F = C f C^T. Throws InvalidBlockSize for b < 2.
CoeffBlock dct2(const Block& block);
CoeffBlock dct2(const Block& block, const DctPlan& plan);

/// One level of the 2-D Haar transform, orthonormal scaling: each axis maps
/// a sample pair (p, q) to ((p+q)/sqrt2, (p-q)/sqrt2), so LL of a constant-c
/// image is 2c and total energy is preserved. Odd trailing row/column is
/// dropped. Subbands carry PixelDomain::transform.
struct DwtQuad {
    GrayImage ll, lh, hl, hh;
};

DwtQuad haar_dwt(const GrayImage& img);

/// Global PCA basis fitted over a block-vector population.
struct PcaBasis {
    int dim = 0;  // b*b
    int k = 0;
    std::vector<double> mean;      // length dim
    Matrix components;             // k rows of length dim, orthonormal
    std::vector<double> variances; // length k, descending
};

/// Mean-centered covariance eigendecomposition of the sample rows; keeps the
/// top k components by variance. Throws InvalidInput for fewer than two
/// samples or k outside [1, dim]. All-identical samples give zero variances.
PcaBasis pca_fit(const Matrix& samples, int k);

/// Block descriptor: integer-quantized values tagged with the block origin.
struct FeatureVector {
    Point origin;
    std::vector<std::int64_t> values;
};

/// round(v / q), half away from zero. Throws InvalidInput for q <= 0.
std::vector<std::int64_t> quantize(std::span<const double> values, double q);

/// Shared scalar rule, kept in one place so every descriptor path quantizes
/// with bit-identical arithmetic.
inline std::int64_t quantize_value(double v, double inv_q) {
    return std::llround(v * inv_q);
}

/// Low-frequency DCT descriptor: the top-left (b/2)x(b/2) quadrant of
/// dct2(block), flattened row-major and quantized; d = b*b/4. The DC slot is
/// kept but pinned to zero, which is what makes two blocks differing by a
/// constant intensity offset collide (all AC terms are offset-invariant).
/// Throws InvalidBlockSize for odd b.
FeatureVector dct_features(const Block& block, double quant_step = 2.0);

/// Singular-value descriptor: the b singular values, descending, quantized;
/// d = b. Uses the fixed-sweep batched path (see block_singular_values).
FeatureVector svd_features(const Block& block, double quant_step = 2.0);

/// Projection of the mean-centered block onto the basis components, with the
/// uniform-brightness direction removed first, quantized; d = basis.k.
/// Removing the brightness component is what lets a clone whose intensities
/// were shifted by a constant still collide with its source.
/// Throws InvalidInput on dimension mismatch.
FeatureVector pca_features(const Block& block, const PcaBasis& basis, double quant_step = 2.0);

/// Singular values of one square block via Jacobi on B^T B (the square roots
/// of its eigenvalues), run for a fixed number of sweeps so results do not
/// depend on how blocks are batched. Descending. Throws NumericalError on
/// non-finite samples.
std::vector<double> block_singular_values(const Block& block);

/// Same, for a whole stream of same-size blocks laid out contiguously
/// (count * b * b samples); writes count * b singular values. This is the
/// throughput path the SVD-based detectors use.
void batch_singular_values(std::span<const double> blocks, int block_size,
                           std::span<double> out);

}  // namespace clonedetect
