#include "cftower/exact/fp_matrix.hpp"

#include <stdexcept>

namespace cft::exact {

namespace {

mpz_class fp_inv_scalar(const mpz_class& a, const mpz_class& p) {
    mpz_class r;
    if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), p.get_mpz_t()) == 0)
        throw std::invalid_argument("fp_inv_scalar: not invertible");
    return r;
}

}  // namespace

IntMatrix fp_reduce_mat(const IntMatrix& A, const mpz_class& p) {
    IntMatrix R(A.rows(), A.cols());
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = 0; j < A.cols(); ++j) {
            mpz_class v = A(i, j) % p;
            if (v < 0) v += p;
            R(i, j) = v;
        }
    return R;
}

IntMatrix fp_mat_mul(const IntMatrix& A, const IntMatrix& B, const mpz_class& p) {
    return fp_reduce_mat(A * B, p);
}

IntMatrix fp_mat_pow(IntMatrix A, mpz_class e, const mpz_class& p) {
    if (A.rows() != A.cols()) throw std::invalid_argument("fp_mat_pow: square required");
    IntMatrix R = IntMatrix::identity(A.rows());
    A = fp_reduce_mat(A, p);
    while (e > 0) {
        if (mpz_odd_p(e.get_mpz_t())) R = fp_mat_mul(R, A, p);
        A = fp_mat_mul(A, A, p);
        e >>= 1;
    }
    return R;
}

IntMatrix fp_rref(const IntMatrix& A, const mpz_class& p, std::vector<std::size_t>* pivots) {
    IntMatrix R = fp_reduce_mat(A, p);
    if (pivots) pivots->clear();
    std::size_t r = 0;
    for (std::size_t c = 0; c < R.cols() && r < R.rows(); ++c) {
        std::size_t piv = r;
        while (piv < R.rows() && R(piv, c) == 0) ++piv;
        if (piv == R.rows()) continue;
        if (piv != r)
            for (std::size_t j = 0; j < R.cols(); ++j) std::swap(R(piv, j), R(r, j));
        mpz_class inv = fp_inv_scalar(R(r, c), p);
        for (std::size_t j = 0; j < R.cols(); ++j) R(r, j) = R(r, j) * inv % p;
        for (std::size_t i = 0; i < R.rows(); ++i) {
            if (i == r || R(i, c) == 0) continue;
            mpz_class m = R(i, c);
            for (std::size_t j = 0; j < R.cols(); ++j) {
                R(i, j) = (R(i, j) - m * R(r, j)) % p;
                if (R(i, j) < 0) R(i, j) += p;
            }
        }
        if (pivots) pivots->push_back(c);
        ++r;
    }
    // Drop zero rows.
    IntMatrix out(r, R.cols());
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < R.cols(); ++j) out(i, j) = R(i, j);
    return out;
}

IntMatrix fp_left_kernel_mat(const IntMatrix& A, const mpz_class& p) {
    // Row-reduce [A | I] and read kernel rows from the right block.
    std::size_t n = A.rows(), m = A.cols();
    IntMatrix aug(n, m + n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            mpz_class v = A(i, j) % p;
            if (v < 0) v += p;
            aug(i, j) = v;
        }
        aug(i, m + i) = 1;
    }
    std::size_t r = 0;
    for (std::size_t c = 0; c < m && r < n; ++c) {
        std::size_t piv = r;
        while (piv < n && aug(piv, c) == 0) ++piv;
        if (piv == n) continue;
        if (piv != r)
            for (std::size_t j = 0; j < m + n; ++j) std::swap(aug(piv, j), aug(r, j));
        mpz_class inv = fp_inv_scalar(aug(r, c), p);
        for (std::size_t j = 0; j < m + n; ++j) aug(r, j) = aug(r, j) * inv % p;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == r || aug(i, c) == 0) continue;
            mpz_class mlt = aug(i, c);
            for (std::size_t j = 0; j < m + n; ++j) {
                aug(i, j) = (aug(i, j) - mlt * aug(r, j)) % p;
                if (aug(i, j) < 0) aug(i, j) += p;
            }
        }
        ++r;
    }
    IntMatrix K(n - r, n);
    for (std::size_t i = r; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) K(i - r, j) = aug(i, m + j);
    return K;
}

bool fp_solve_left(const IntMatrix& A, const std::vector<mpz_class>& b,
                   std::vector<mpz_class>& x, const mpz_class& p) {
    // Solve x A = b <=> A^T x^T = b^T: reduce [A^T | b^T].
    std::size_t n = A.rows(), m = A.cols();
    if (b.size() != m) throw std::invalid_argument("fp_solve_left: size mismatch");
    IntMatrix aug(m, n + 1);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            mpz_class v = A(j, i) % p;
            if (v < 0) v += p;
            aug(i, j) = v;
        }
        mpz_class v = b[i] % p;
        if (v < 0) v += p;
        aug(i, n) = v;
    }
    std::vector<std::size_t> pivots;
    IntMatrix R = fp_rref(aug, p, &pivots);
    x.assign(n, mpz_class(0));
    for (std::size_t i = 0; i < pivots.size(); ++i) {
        if (pivots[i] == n) return false;  // pivot in the augmented column
        x[pivots[i]] = R(i, n);
    }
    return true;
}

IntMatrix fp_inverse(const IntMatrix& A, const mpz_class& p) {
    std::size_t n = A.rows();
    if (A.cols() != n) throw std::invalid_argument("fp_inverse: square required");
    IntMatrix aug(n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            mpz_class v = A(i, j) % p;
            if (v < 0) v += p;
            aug(i, j) = v;
        }
        aug(i, n + i) = 1;
    }
    std::vector<std::size_t> pivots;
    IntMatrix R = fp_rref(aug, p, &pivots);
    if (pivots.size() != n || pivots.back() != n - 1)
        throw std::invalid_argument("fp_inverse: singular matrix");
    IntMatrix inv(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) inv(i, j) = R(i, n + j);
    return inv;
}

}  // namespace cft::exact
