#pragma once

// Batched fixed-sweep Jacobi for the small Gram matrices (B^T B) behind the
// singular-value descriptors. Lanes are independent problems laid out SoA so
// the rotation arithmetic vectorizes; the sqrt/div latency chains of a single
// 4x4 Jacobi would otherwise dominate the whole pipeline. The sweep count is
// fixed per matrix order, never data-dependent, so a block's descriptor does
// not depend on which batch it landed in.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "clonedetect/image.hpp"

namespace clonedetect::detail {

// Cyclic Jacobi converges quadratically; for the tiny Gram matrices here
// these fixed counts land at (or within test tolerance of) double precision.
inline int jacobi_sweeps_for(int n) {
    if (n <= 4) return 4;
    if (n <= 8) return 7;
    return 10;
}

class SymJacobiBatch {
public:
    static constexpr int kLanes = 32;

    explicit SymJacobiBatch(int n)
        : n_(n),
          noff_(n * (n - 1) / 2),
          diag_(static_cast<std::size_t>(n) * kLanes),
          off_(static_cast<std::size_t>(noff_) * kLanes),
          row_ptrs_(static_cast<std::size_t>(n)),
          scratch_(static_cast<std::size_t>(n) * n) {}

    int order() const { return n_; }

    // Gram matrix of the b x b window at `origin` (column dot products).
    void load_gram_from_raster(const GrayImage& img, Point origin, int lane) {
        const int b = n_;
        const double* src =
            img.pixels.data() + static_cast<std::size_t>(origin.y) * img.width + origin.x;
        for (int k = 0; k < b; ++k) row_ptrs_[k] = src + static_cast<std::size_t>(k) * img.width;
        const double* const* rows = row_ptrs_.data();
        for (int r = 0; r < b; ++r) {
            for (int c = r; c < b; ++c) {
                double acc = 0.0;
                for (int k = 0; k < b; ++k) acc += rows[k][r] * rows[k][c];
                store(r, c, lane, acc);
            }
        }
    }

    // Gram matrix of one b x b sample block (row-major samples).
    void load_gram_from_samples(const double* samples, int lane) {
        const int b = n_;
        for (int r = 0; r < b; ++r) {
            for (int c = r; c < b; ++c) {
                double acc = 0.0;
                for (int k = 0; k < b; ++k) acc += samples[k * b + r] * samples[k * b + c];
                store(r, c, lane, acc);
            }
        }
    }

    void run(int lanes) {
        const int sweeps = jacobi_sweeps_for(n_);
        for (int sweep = 0; sweep < sweeps; ++sweep) {
            for (int p = 0; p < n_ - 1; ++p)
                for (int q = p + 1; q < n_; ++q) rotate(p, q, lanes);
        }
    }

    // Descending singular values (sqrt of the eigenvalues, clamped at zero).
    void extract_singular_values(int lane, double* out) {
        for (int i = 0; i < n_; ++i) scratch_[i] = diag_[static_cast<std::size_t>(i) * kLanes + lane];
        // insertion sort; n is a block side, tiny
        for (int i = 1; i < n_; ++i) {
            const double v = scratch_[i];
            int j = i - 1;
            while (j >= 0 && scratch_[j] < v) {
                scratch_[j + 1] = scratch_[j];
                --j;
            }
            scratch_[j + 1] = v;
        }
        for (int i = 0; i < n_; ++i) out[i] = std::sqrt(std::max(0.0, scratch_[i]));
    }

private:
    std::size_t off_index(int p, int q) const {  // p < q
        return static_cast<std::size_t>(p) * n_ - static_cast<std::size_t>(p) * (p + 1) / 2 +
               (q - p - 1);
    }

    void store(int r, int c, int lane, double value) {
        if (r == c)
            diag_[static_cast<std::size_t>(r) * kLanes + lane] = value;
        else
            off_[off_index(r, c) * kLanes + lane] = value;
    }

    void rotate(int p, int q, int lanes) {
        double* __restrict dp = diag_.data() + static_cast<std::size_t>(p) * kLanes;
        double* __restrict dq = diag_.data() + static_cast<std::size_t>(q) * kLanes;
        double* __restrict opq = off_.data() + off_index(p, q) * kLanes;
        double c_buf[kLanes];
        double s_buf[kLanes];
        for (int l = 0; l < lanes; ++l) {
            const double apq = opq[l];
            const double tau = (dq[l] - dp[l]) / (2.0 * apq);
            // t = sign(tau) / (|tau| + sqrt(1 + tau^2)) = s / c, with
            // c = den / sqrt(den^2 + 1) and s = sign(tau) / sqrt(den^2 + 1).
            // Oversized tau (including the inf/NaN from apq == 0) means the
            // rotation is an identity within double precision.
            const bool spin = std::fabs(tau) < 1.0e150;
            const double den = std::fabs(tau) + std::sqrt(1.0 + tau * tau);
            const double inv = 1.0 / std::sqrt(den * den + 1.0);
            const double c = spin ? den * inv : 1.0;
            const double s = spin ? std::copysign(inv, tau) : 0.0;
            const double cc = c * c, ss = s * s, cs2 = 2.0 * c * s * apq;
            const double dpl = dp[l], dql = dq[l];
            dp[l] = cc * dpl + ss * dql - cs2;
            dq[l] = ss * dpl + cc * dql + cs2;
            opq[l] = 0.0;
            c_buf[l] = c;
            s_buf[l] = s;
        }
        for (int k = 0; k < n_; ++k) {
            if (k == p || k == q) continue;
            double* __restrict akp =
                off_.data() + off_index(std::min(k, p), std::max(k, p)) * kLanes;
            double* __restrict akq =
                off_.data() + off_index(std::min(k, q), std::max(k, q)) * kLanes;
            for (int l = 0; l < lanes; ++l) {
                const double xp = akp[l], xq = akq[l];
                akp[l] = c_buf[l] * xp - s_buf[l] * xq;
                akq[l] = s_buf[l] * xp + c_buf[l] * xq;
            }
        }
    }

    int n_;
    int noff_;
    std::vector<double> diag_;  // n  rows of kLanes
    std::vector<double> off_;   // upper triangle rows of kLanes
    std::vector<const double*> row_ptrs_;
    std::vector<double> scratch_;
};

}  // namespace clonedetect::detail
