#include <doctest.h>

#include <cmath>

#include "clonedetect/errors.hpp"
#include "clonedetect/features.hpp"
#include "oracles.hpp"
#include "test_helpers.hpp"

using namespace clonedetect;

namespace {

double energy(std::span<const double> values) {
    double acc = 0.0;
    for (double v : values) acc += v * v;
    return acc;
}

Block offset_block(const Block& b, double delta) {
    Block out = b;
    for (double& s : out.samples) s += delta;
    return out;
}

}  // namespace

TEST_CASE("dct2 of a constant block is DC-only with F(0,0) = b*c") {
    for (int b : {2, 4, 8}) {
        const double c = 37.0;
        const Block blk = testutil::block_from(b, std::vector<double>(b * b, c));
        const CoeffBlock f = dct2(blk);
        CHECK(f.at(0, 0) == doctest::Approx(b * c).epsilon(1e-12));
        for (int u = 0; u < b; ++u)
            for (int v = 0; v < b; ++v)
                if (u || v) CHECK(std::fabs(f.at(u, v)) < 1e-9);
    }
}

TEST_CASE("dct2 matches the direct four-loop definition within 1e-9") {
    testutil::Rng rng(101);
    for (int b : {4, 8}) {
        for (int trial = 0; trial < 5; ++trial) {
            const Block blk = testutil::random_block(b, rng);
            const CoeffBlock fast = dct2(blk);
            const std::vector<double> direct = testutil::dct2_direct(blk);
            for (std::size_t i = 0; i < direct.size(); ++i)
                CHECK(std::fabs(fast.coeffs[i] - direct[i]) < 1e-9);
        }
    }
}

TEST_CASE("dct2 preserves energy and inverts") {
    testutil::Rng rng(55);
    for (int trial = 0; trial < 8; ++trial) {
        const Block blk = testutil::random_block(trial % 2 ? 8 : 4, rng);
        const CoeffBlock f = dct2(blk);
        CHECK(energy(f.coeffs) ==
              doctest::Approx(energy(blk.samples)).epsilon(1e-9));  // Parseval
        const std::vector<double> back = testutil::idct2_direct(f);
        for (std::size_t i = 0; i < back.size(); ++i)
            CHECK(std::fabs(back[i] - blk.samples[i]) < 1e-9);
    }
}

TEST_CASE("a constant offset only moves the DC coefficient") {
    testutil::Rng rng(66);
    const Block blk = testutil::random_block(4, rng);
    const CoeffBlock base = dct2(blk);
    const CoeffBlock shifted = dct2(offset_block(blk, 50.0));
    CHECK(std::fabs(shifted.at(0, 0) - base.at(0, 0) - 4 * 50.0) < 1e-9);
    for (int u = 0; u < 4; ++u)
        for (int v = 0; v < 4; ++v)
            if (u || v) CHECK(std::fabs(shifted.at(u, v) - base.at(u, v)) < 1e-9);
}

TEST_CASE("dct_features dimensions and offset collisions") {
    testutil::Rng rng(9);
    SUBCASE("quarter retention: b=4 -> d=4, b=8 -> d=16") {
        CHECK(dct_features(testutil::random_block(4, rng)).values.size() == 4);
        CHECK(dct_features(testutil::random_block(8, rng)).values.size() == 16);
    }
    SUBCASE("odd block size is rejected") {
        CHECK_THROWS_AS((void)dct_features(testutil::random_block(5, rng)), InvalidBlockSize);
    }
    SUBCASE("blocks differing by a constant offset collide") {
        for (int trial = 0; trial < 10; ++trial) {
            Block blk = testutil::random_block(4, rng, 60.0, 200.0);
            for (double& s : blk.samples) s = std::floor(s);  // integer pixels
            const FeatureVector a = dct_features(blk);
            const FeatureVector b = dct_features(offset_block(blk, -50.0));
            CHECK(a.values == b.values);
        }
    }
}

TEST_CASE("haar_dwt basics") {
    SUBCASE("constant image: LL = 2c, detail subbands zero") {
        const double c = 12.5;
        GrayImage img = GrayImage::zeros(8, 6);
        for (double& p : img.pixels) p = c;
        const DwtQuad q = haar_dwt(img);
        CHECK(q.ll.width == 4);
        CHECK(q.ll.height == 3);
        CHECK(q.ll.domain == PixelDomain::transform);
        for (double v : q.ll.pixels) CHECK(v == doctest::Approx(2 * c).epsilon(1e-12));
        for (const GrayImage* band : {&q.lh, &q.hl, &q.hh})
            for (double v : band->pixels) CHECK(v == 0.0);
    }
    SUBCASE("dimensions halve with floor on odd sizes") {
        const DwtQuad q = haar_dwt(testutil::noise_image(9, 7, 3));
        CHECK(q.ll.width == 4);
        CHECK(q.ll.height == 3);
    }
    SUBCASE("energy is conserved on even dimensions") {
        const GrayImage img = testutil::noise_image(16, 16, 17);
        const DwtQuad q = haar_dwt(img);
        const double total = energy(q.ll.pixels) + energy(q.lh.pixels) + energy(q.hl.pixels) +
                             energy(q.hh.pixels);
        CHECK(total == doctest::Approx(energy(img.pixels)).epsilon(1e-9));
    }
    SUBCASE("128x128 halves to 64x64, dropping the b=4 block count to 3721") {
        const DwtQuad q = haar_dwt(testutil::noise_image(128, 128, 8));
        CHECK(q.ll.width == 64);
        CHECK(block_grid(q.ll, 4).count() == 3721);
    }
    SUBCASE("too small") {
        CHECK_THROWS_AS((void)haar_dwt(GrayImage::zeros(1, 5)), InvalidInput);
    }
}

TEST_CASE("svd_features") {
    testutil::Rng rng(31);
    SUBCASE("constant block is rank 1: s = (b*c, 0, ..., 0)") {
        const int b = 4;
        const double c = 25.0;
        const Block blk = testutil::block_from(b, std::vector<double>(b * b, c));
        const std::vector<double> s = block_singular_values(blk);
        CHECK(s[0] == doctest::Approx(b * c).epsilon(1e-10));
        for (std::size_t i = 1; i < s.size(); ++i) CHECK(std::fabs(s[i]) < 1e-8 * s[0]);
    }
    SUBCASE("identical blocks give bit-identical descriptors") {
        const Block blk = testutil::random_block(4, rng);
        Block same = blk;
        same.origin = {9, 9};
        CHECK(svd_features(blk).values == svd_features(same).values);
    }
    SUBCASE("transpose invariance") {
        for (int trial = 0; trial < 10; ++trial) {
            const Block blk = testutil::random_block(4, rng);
            Block t = blk;
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c) t.samples[c * 4 + r] = blk.samples[r * 4 + c];
            CHECK(svd_features(blk).values == svd_features(t).values);
        }
    }
    SUBCASE("fixed-sweep fast path agrees with the full svd") {
        for (int b : {4, 8}) {
            for (int trial = 0; trial < 10; ++trial) {
                const Block blk = testutil::random_block(b, rng);
                Matrix m(b, b);
                m.data = blk.samples;
                const SvdTriple full = svd(m);
                const std::vector<double> fast = block_singular_values(blk);
                for (int i = 0; i < b; ++i)
                    CHECK(std::fabs(fast[i] - full.s[i]) <= 1e-6 * std::max(1.0, full.s[0]));
            }
        }
    }
    SUBCASE("batch path is bit-identical to the single-block path") {
        const int b = 4;
        std::vector<double> flat;
        std::vector<Block> blocks;
        for (int i = 0; i < 50; ++i) {
            blocks.push_back(testutil::random_block(b, rng));
            flat.insert(flat.end(), blocks.back().samples.begin(), blocks.back().samples.end());
        }
        std::vector<double> batched(50 * b);
        batch_singular_values(flat, b, batched);
        for (int i = 0; i < 50; ++i) {
            const std::vector<double> single = block_singular_values(blocks[i]);
            for (int k = 0; k < b; ++k) CHECK(batched[i * b + k] == single[k]);
        }
    }
    SUBCASE("non-finite input is rejected") {
        Block blk = testutil::random_block(4, rng);
        blk.samples[3] = std::nan("");
        CHECK_THROWS_AS((void)svd_features(blk), NumericalError);
    }
}

TEST_CASE("pca_fit") {
    testutil::Rng rng(123);
    SUBCASE("1-D affine family: first component captures all variance") {
        const int d = 16;
        Matrix samples(40, d);
        std::vector<double> base(d), dir(d);
        for (int c = 0; c < d; ++c) {
            base[c] = rng.real(0.0, 10.0);
            dir[c] = rng.real(-1.0, 1.0);
        }
        for (int r = 0; r < 40; ++r) {
            const double t = rng.real(-5.0, 5.0);
            for (int c = 0; c < d; ++c) samples.at(r, c) = base[c] + t * dir[c];
        }
        const PcaBasis basis = pca_fit(samples, d);
        double total = 0.0;
        for (double v : basis.variances) total += v;
        CHECK(basis.variances[0] >= (1.0 - 1e-9) * total);
    }
    SUBCASE("all-identical vectors: every variance is zero") {
        Matrix samples(10, 9);
        for (int r = 0; r < 10; ++r)
            for (int c = 0; c < 9; ++c) samples.at(r, c) = 3.25 * c;
        const PcaBasis basis = pca_fit(samples, 9);
        for (double v : basis.variances) CHECK(std::fabs(v) < 1e-12);
    }
    SUBCASE("full basis is lossless on random 50x16 data") {
        const Matrix samples = testutil::random_matrix(50, 16, rng, 0.0, 255.0);
        const PcaBasis basis = pca_fit(samples, 16);
        for (int r = 0; r < 50; ++r) {
            // project onto all 16 components and reconstruct
            std::vector<double> rec(16);
            for (int c = 0; c < 16; ++c) rec[c] = basis.mean[c];
            for (int k = 0; k < 16; ++k) {
                double proj = 0.0;
                for (int c = 0; c < 16; ++c)
                    proj += (samples.at(r, c) - basis.mean[c]) * basis.components.at(k, c);
                for (int c = 0; c < 16; ++c) rec[c] += proj * basis.components.at(k, c);
            }
            for (int c = 0; c < 16; ++c) CHECK(std::fabs(rec[c] - samples.at(r, c)) < 1e-8);
        }
    }
    SUBCASE("components are orthonormal") {
        const Matrix samples = testutil::random_matrix(80, 16, rng, 0.0, 255.0);
        const PcaBasis basis = pca_fit(samples, 8);
        for (int i = 0; i < 8; ++i) {
            for (int j = 0; j < 8; ++j) {
                double dot = 0.0;
                for (int c = 0; c < 16; ++c)
                    dot += basis.components.at(i, c) * basis.components.at(j, c);
                CHECK(std::fabs(dot - (i == j ? 1.0 : 0.0)) <= 1e-8);
            }
        }
    }
    SUBCASE("variances are descending") {
        const Matrix samples = testutil::random_matrix(60, 9, rng, -4.0, 4.0);
        const PcaBasis basis = pca_fit(samples, 9);
        for (std::size_t i = 1; i < basis.variances.size(); ++i)
            CHECK(basis.variances[i] <= basis.variances[i - 1] + 1e-12);
    }
    SUBCASE("argument validation") {
        const Matrix ok = testutil::random_matrix(5, 4, rng);
        CHECK_THROWS_AS((void)pca_fit(ok, 0), InvalidInput);
        CHECK_THROWS_AS((void)pca_fit(ok, 5), InvalidInput);
        CHECK_THROWS_AS((void)pca_fit(testutil::random_matrix(1, 4, rng), 2), InvalidInput);
    }
}

TEST_CASE("pca_features") {
    testutil::Rng rng(321);
    // population: random 4x4 integer blocks
    Matrix samples(60, 16);
    for (int r = 0; r < 60; ++r)
        for (int c = 0; c < 16; ++c) samples.at(r, c) = rng.range(0, 255);
    const PcaBasis basis = pca_fit(samples, 4);

    SUBCASE("block equal to the population mean maps to the zero descriptor") {
        Block blk = testutil::block_from(4, std::vector<double>(16));
        blk.samples.assign(basis.mean.begin(), basis.mean.end());
        for (std::int64_t v : pca_features(blk, basis).values) CHECK(v == 0);
    }
    SUBCASE("identical blocks collide") {
        Block blk = testutil::random_block(4, rng);
        Block same = blk;
        same.origin = {3, 7};
        CHECK(pca_features(blk, basis).values == pca_features(same, basis).values);
    }
    SUBCASE("a constant intensity offset does not change the descriptor") {
        for (int trial = 0; trial < 10; ++trial) {
            Block blk = testutil::random_block(4, rng, 60.0, 200.0);
            for (double& s : blk.samples) s = std::floor(s);
            CHECK(pca_features(blk, basis).values ==
                  pca_features(offset_block(blk, -50.0), basis).values);
        }
    }
    SUBCASE("dimension mismatch is rejected") {
        CHECK_THROWS_AS((void)pca_features(testutil::random_block(8, rng), basis), InvalidInput);
    }
}

TEST_CASE("pca_fit is insensitive to sample order") {
    testutil::Rng rng(48);
    Matrix samples(300, 16);
    for (double& v : samples.data) v = rng.real(0.0, 255.0);
    const PcaBasis a = pca_fit(samples, 16);

    // reverse the rows: mathematically the same population
    Matrix reversed(300, 16);
    for (int r = 0; r < 300; ++r)
        for (int c = 0; c < 16; ++c) reversed.at(r, c) = samples.at(299 - r, c);
    const PcaBasis b = pca_fit(reversed, 16);

    for (int c = 0; c < 16; ++c) CHECK(std::fabs(a.mean[c] - b.mean[c]) <= 1e-10);
    double total = 0.0;
    for (double v : a.variances) total += v;
    for (int i = 0; i < 16; ++i)
        CHECK(std::fabs(a.variances[i] - b.variances[i]) <= 1e-10 * std::max(1.0, total));
}

TEST_CASE("quantize") {
    SUBCASE("round-half rule at representative points") {
        const std::vector<double> in = {0.0, 1.49, -1.49};
        CHECK(quantize(in, 1.0) == std::vector<std::int64_t>{0, 1, -1});
    }
    SUBCASE("small step is the identity up to scale") {
        const std::vector<double> in = {3.0, -7.0, 12.0};
        CHECK(quantize(in, 0.5) == std::vector<std::int64_t>{6, -14, 24});
    }
    SUBCASE("invalid step") {
        CHECK_THROWS_AS((void)quantize(std::vector<double>{1.0}, 0.0), InvalidInput);
        CHECK_THROWS_AS((void)quantize(std::vector<double>{1.0}, -2.0), InvalidInput);
    }
}
