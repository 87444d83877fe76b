#include "clonedetect/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "clonedetect/errors.hpp"

namespace clonedetect {

namespace {

bool all_finite(const Matrix& m) {
    for (double v : m.data)
        if (!std::isfinite(v)) return false;
    return true;
}

}  // namespace

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

Matrix Matrix::transposed() const {
    Matrix t(cols, rows);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) t.at(c, r) = at(r, c);
    return t;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows) throw InvalidInput("matmul: inner dimensions differ");
    Matrix out(a.rows, b.cols);
    for (int r = 0; r < a.rows; ++r) {
        for (int k = 0; k < a.cols; ++k) {
            const double arv = a.at(r, k);
            if (arv == 0.0) continue;
            for (int c = 0; c < b.cols; ++c) out.at(r, c) += arv * b.at(k, c);
        }
    }
    return out;
}

SvdTriple svd(const Matrix& input) {
    if (input.rows <= 0 || input.cols <= 0) throw InvalidInput("svd: empty matrix");
    if (!all_finite(input)) throw NumericalError("svd: non-finite input");

    // Work on the tall orientation; B = U S V^T implies B^T = V S U^T.
    if (input.rows < input.cols) {
        SvdTriple t = svd(input.transposed());
        return SvdTriple{std::move(t.v), std::move(t.s), std::move(t.u)};
    }

    const int m = input.rows;
    const int n = input.cols;
    Matrix w = input;       // columns get orthogonalized in place
    Matrix v = Matrix::identity(n);

    // One-sided Jacobi: rotate column pairs until all are mutually
    // orthogonal relative to their norms.
    const double eps = 1e-15;
    const int max_sweeps = 60;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool rotated = false;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (int r = 0; r < m; ++r) {
                    const double wp = w.at(r, p), wq = w.at(r, q);
                    alpha += wp * wp;
                    beta += wq * wq;
                    gamma += wp * wq;
                }
                if (gamma * gamma <= eps * eps * alpha * beta) continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = std::copysign(1.0, zeta) /
                                 (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (int r = 0; r < m; ++r) {
                    const double wp = w.at(r, p), wq = w.at(r, q);
                    w.at(r, p) = c * wp - s * wq;
                    w.at(r, q) = s * wp + c * wq;
                }
                for (int r = 0; r < n; ++r) {
                    const double vp = v.at(r, p), vq = v.at(r, q);
                    v.at(r, p) = c * vp - s * vq;
                    v.at(r, q) = s * vp + c * vq;
                }
            }
        }
        if (!rotated) break;
    }

    std::vector<double> sigma(n);
    for (int j = 0; j < n; ++j) {
        double norm2 = 0.0;
        for (int r = 0; r < m; ++r) norm2 += w.at(r, j) * w.at(r, j);
        sigma[j] = std::sqrt(norm2);
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return sigma[a] > sigma[b]; });

    SvdTriple out;
    out.s.resize(n);
    out.u = Matrix(m, m);
    out.v = Matrix(n, n);
    for (int j = 0; j < n; ++j) {
        const int src = order[j];
        out.s[j] = sigma[src];
        for (int r = 0; r < n; ++r) out.v.at(r, j) = v.at(r, src);
    }

    const double sigma_max = out.s.empty() ? 0.0 : out.s[0];
    const double rank_tol = sigma_max * 1e-13;
    int filled = 0;
    for (int j = 0; j < n; ++j) {
        if (out.s[j] <= rank_tol) break;  // descending, rest are junk directions
        const int src = order[j];
        const double inv = 1.0 / out.s[j];
        for (int r = 0; r < m; ++r) out.u.at(r, j) = w.at(r, src) * inv;
        ++filled;
    }

    // Complete U to a full orthonormal m x m basis (rank-deficient inputs and
    // the m > n case): Gram-Schmidt unit vectors against what we have.
    for (int col = filled; col < m; ++col) {
        for (int candidate = 0; candidate < m; ++candidate) {
            std::vector<double> vec(m, 0.0);
            vec[candidate] = 1.0;
            for (int pass = 0; pass < 2; ++pass) {
                for (int j = 0; j < col; ++j) {
                    double dot = 0.0;
                    for (int r = 0; r < m; ++r) dot += vec[r] * out.u.at(r, j);
                    for (int r = 0; r < m; ++r) vec[r] -= dot * out.u.at(r, j);
                }
            }
            double norm2 = 0.0;
            for (double x : vec) norm2 += x * x;
            if (norm2 > 1e-6) {
                const double inv = 1.0 / std::sqrt(norm2);
                for (int r = 0; r < m; ++r) out.u.at(r, col) = vec[r] * inv;
                break;
            }
        }
    }
    return out;
}

EigenDecomposition symmetric_eigen(Matrix a) {
    if (a.rows != a.cols || a.rows <= 0)
        throw InvalidInput("symmetric_eigen: matrix must be square");
    if (!all_finite(a)) throw NumericalError("symmetric_eigen: non-finite input");

    const int n = a.rows;
    Matrix vectors = Matrix::identity(n);

    double norm2 = 0.0;
    for (double x : a.data) norm2 += x * x;
    const double off_tol = norm2 * 1e-30 + 1e-300;

    const int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off2 = 0.0;
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) off2 += a.at(p, q) * a.at(p, q);
        if (off2 <= off_tol) break;

        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a.at(p, q);
                if (apq == 0.0) continue;
                const double tau = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
                const double t = std::copysign(1.0, tau) /
                                 (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                const double h = t * apq;
                a.at(p, p) -= h;
                a.at(q, q) += h;
                a.at(p, q) = 0.0;
                a.at(q, p) = 0.0;
                for (int k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = a.at(k, p), akq = a.at(k, q);
                    a.at(k, p) = c * akp - s * akq;
                    a.at(p, k) = a.at(k, p);
                    a.at(k, q) = s * akp + c * akq;
                    a.at(q, k) = a.at(k, q);
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = vectors.at(k, p), vkq = vectors.at(k, q);
                    vectors.at(k, p) = c * vkp - s * vkq;
                    vectors.at(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int i, int j) { return a.at(i, i) > a.at(j, j); });

    EigenDecomposition out;
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    for (int j = 0; j < n; ++j) {
        out.values[j] = a.at(order[j], order[j]);
        for (int r = 0; r < n; ++r) out.vectors.at(r, j) = vectors.at(r, order[j]);
    }
    return out;
}

}  // namespace clonedetect
