#pragma once

// Independent reference implementations the production code is checked
// against. These deliberately take the slow, literal route: the DCT oracle
// evaluates the four-nested-sum definition term by term, and the spectral
// oracle goes through Eigen's solver rather than anything in core.

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <vector>

#include "clonedetect/features.hpp"
#include "clonedetect/image.hpp"
#include "clonedetect/linalg.hpp"

namespace testutil {

// Direct summation of the DCT definition with alpha(0) = sqrt(1/N),
// alpha(k>0) = sqrt(2/N); f(x, y) reads column x of row y.
inline std::vector<double> dct2_direct(const clonedetect::Block& block) {
    const int n = block.size;
    auto alpha = [n](int k) { return k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n); };
    std::vector<double> out(static_cast<std::size_t>(n) * n, 0.0);
    for (int u = 0; u < n; ++u) {
        for (int v = 0; v < n; ++v) {
            double acc = 0.0;
            for (int x = 0; x < n; ++x)
                for (int y = 0; y < n; ++y)
                    acc += block.samples[static_cast<std::size_t>(y) * n + x] *
                           std::cos((2.0 * x + 1.0) * u * std::numbers::pi / (2.0 * n)) *
                           std::cos((2.0 * y + 1.0) * v * std::numbers::pi / (2.0 * n));
            out[static_cast<std::size_t>(u) * n + v] = alpha(u) * alpha(v) * acc;
        }
    }
    return out;
}

// Inverse of the orthonormal 2-D DCT (test-only; core has no inverse path).
inline std::vector<double> idct2_direct(const clonedetect::CoeffBlock& coeffs) {
    const int n = coeffs.size;
    auto alpha = [n](int k) { return k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n); };
    std::vector<double> out(static_cast<std::size_t>(n) * n, 0.0);
    for (int x = 0; x < n; ++x) {
        for (int y = 0; y < n; ++y) {
            double acc = 0.0;
            for (int u = 0; u < n; ++u)
                for (int v = 0; v < n; ++v)
                    acc += alpha(u) * alpha(v) * coeffs.at(u, v) *
                           std::cos((2.0 * x + 1.0) * u * std::numbers::pi / (2.0 * n)) *
                           std::cos((2.0 * y + 1.0) * v * std::numbers::pi / (2.0 * n));
            out[static_cast<std::size_t>(y) * n + x] = acc;
        }
    }
    return out;
}

inline Eigen::MatrixXd to_eigen(const clonedetect::Matrix& m) {
    Eigen::MatrixXd out(m.rows, m.cols);
    for (int r = 0; r < m.rows; ++r)
        for (int c = 0; c < m.cols; ++c) out(r, c) = m.at(r, c);
    return out;
}

// Singular values as the square roots of the eigenvalues of B^T B, via
// Eigen's self-adjoint solver. Descending.
inline std::vector<double> singular_values_eigen_oracle(const clonedetect::Matrix& m) {
    const Eigen::MatrixXd b = to_eigen(m);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(b.transpose() * b);
    std::vector<double> out;
    for (int i = solver.eigenvalues().size() - 1; i >= 0; --i)
        out.push_back(std::sqrt(std::max(0.0, solver.eigenvalues()[i])));
    return out;
}

// Eigenvalues of a symmetric matrix, descending, via Eigen.
inline std::vector<double> symmetric_eigenvalues_oracle(const clonedetect::Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(to_eigen(m));
    std::vector<double> out;
    for (int i = solver.eigenvalues().size() - 1; i >= 0; --i)
        out.push_back(solver.eigenvalues()[i]);
    return out;
}

}  // namespace testutil
