#pragma once

#include <vector>

namespace clonedetect {

/// Small dense row-major matrix of doubles. Nothing clever: the blocks this
/// toolkit decomposes are b x b with b in the single digits.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

    static Matrix identity(int n);

    double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
    double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }

    Matrix transposed() const;
};

Matrix matmul(const Matrix& a, const Matrix& b);

/// B = U diag(s) V^T with U (m x m) and V (n x n) orthogonal and the
/// singular values s (length min(m, n)) non-negative and descending.
struct SvdTriple {
    Matrix u;
    std::vector<double> s;
    Matrix v;
};

/// Full SVD by one-sided Jacobi, iterated to machine precision.
/// Throws NumericalError on non-finite input.
SvdTriple svd(const Matrix& b);

/// Eigenvalues (descending) and eigenvectors (matching columns) of a
/// symmetric matrix, by cyclic Jacobi.
struct EigenDecomposition {
    std::vector<double> values;
    Matrix vectors;  // column i pairs with values[i]
};

EigenDecomposition symmetric_eigen(Matrix a);

}  // namespace clonedetect
