#include "cftower/exact/int_matrix.hpp"

#include <algorithm>
#include <sstream>

namespace cft::exact {

IntMatrix IntMatrix::identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

IntMatrix IntMatrix::from_longs(std::size_t r, std::size_t c, const std::vector<long>& e) {
    if (e.size() != r * c) throw std::invalid_argument("from_longs: entry count mismatch");
    IntMatrix m(r, c);
    for (std::size_t i = 0; i < e.size(); ++i) m.a_[i] = e[i];
    return m;
}

IntMatrix IntMatrix::operator*(const IntMatrix& o) const {
    if (nc_ != o.nr_) throw std::invalid_argument("matrix product: dimension mismatch");
    IntMatrix r(nr_, o.nc_);
    mpz_class t;
    for (std::size_t i = 0; i < nr_; ++i)
        for (std::size_t k = 0; k < nc_; ++k) {
            const mpz_class& aik = (*this)(i, k);
            if (aik == 0) continue;
            for (std::size_t j = 0; j < o.nc_; ++j) {
                t = aik * o(k, j);
                r(i, j) += t;
            }
        }
    return r;
}

IntMatrix IntMatrix::operator+(const IntMatrix& o) const {
    if (nr_ != o.nr_ || nc_ != o.nc_) throw std::invalid_argument("matrix sum: dimension mismatch");
    IntMatrix r(nr_, nc_);
    for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] + o.a_[i];
    return r;
}

IntMatrix IntMatrix::operator-(const IntMatrix& o) const {
    if (nr_ != o.nr_ || nc_ != o.nc_) throw std::invalid_argument("matrix diff: dimension mismatch");
    IntMatrix r(nr_, nc_);
    for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] - o.a_[i];
    return r;
}

IntMatrix IntMatrix::operator-() const {
    IntMatrix r(nr_, nc_);
    for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = -a_[i];
    return r;
}

IntMatrix IntMatrix::transpose() const {
    IntMatrix r(nc_, nr_);
    for (std::size_t i = 0; i < nr_; ++i)
        for (std::size_t j = 0; j < nc_; ++j) r(j, i) = (*this)(i, j);
    return r;
}

bool IntMatrix::is_zero() const {
    return std::all_of(a_.begin(), a_.end(), [](const mpz_class& x) { return x == 0; });
}

IntMatrix IntMatrix::vstack(const IntMatrix& other) const {
    if (nc_ != other.nc_) throw std::invalid_argument("vstack: column mismatch");
    IntMatrix r(nr_ + other.nr_, nc_);
    std::copy(a_.begin(), a_.end(), r.a_.begin());
    std::copy(other.a_.begin(), other.a_.end(), r.a_.begin() + a_.size());
    return r;
}

IntMatrix IntMatrix::hstack(const IntMatrix& other) const {
    if (nr_ != other.nr_) throw std::invalid_argument("hstack: row mismatch");
    IntMatrix r(nr_, nc_ + other.nc_);
    for (std::size_t i = 0; i < nr_; ++i) {
        for (std::size_t j = 0; j < nc_; ++j) r(i, j) = (*this)(i, j);
        for (std::size_t j = 0; j < other.nc_; ++j) r(i, nc_ + j) = other(i, j);
    }
    return r;
}

mpz_class IntMatrix::det() const {
    if (nr_ != nc_) throw std::invalid_argument("det: not square");
    std::size_t n = nr_;
    if (n == 0) return 1;
    IntMatrix m(*this);
    mpz_class prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m(k, k) == 0) {
            std::size_t piv = k;
            while (piv < n && m(piv, k) == 0) ++piv;
            if (piv == n) return 0;
            for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) {
                mpz_class t = m(i, j) * m(k, k) - m(i, k) * m(k, j);
                mpz_divexact(m(i, j).get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
            }
        prev = m(k, k);
    }
    return sign > 0 ? m(n - 1, n - 1) : mpz_class(-m(n - 1, n - 1));
}

std::string IntMatrix::to_string() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < nr_; ++i) {
        os << '[';
        for (std::size_t j = 0; j < nc_; ++j) os << (*this)(i, j) << (j + 1 < nc_ ? " " : "");
        os << "]\n";
    }
    return os.str();
}

namespace {

// In-place row HNF over Z; returns number of nonzero rows.  Optionally
// accumulates the same row operations into *U.
std::size_t hnf_inplace(IntMatrix& m, IntMatrix* U) {
    std::size_t nr = m.rows(), nc = m.cols();
    std::size_t row = 0;
    for (std::size_t col = 0; col < nc && row < nr; ++col) {
        // Euclidean elimination in this column below `row`.
        while (true) {
            std::size_t piv = nr;
            for (std::size_t i = row; i < nr; ++i)
                if (m(i, col) != 0 &&
                    (piv == nr || mpz_cmpabs(m(i, col).get_mpz_t(), m(piv, col).get_mpz_t()) < 0))
                    piv = i;
            if (piv == nr) break;  // column is zero below row
            if (piv != row) {
                for (std::size_t j = 0; j < nc; ++j) std::swap(m(row, j), m(piv, j));
                if (U)
                    for (std::size_t j = 0; j < U->cols(); ++j) std::swap((*U)(row, j), (*U)(piv, j));
            }
            bool cleared = true;
            for (std::size_t i = row + 1; i < nr; ++i) {
                if (m(i, col) == 0) continue;
                mpz_class q;
                mpz_fdiv_q(q.get_mpz_t(), m(i, col).get_mpz_t(), m(row, col).get_mpz_t());
                for (std::size_t j = 0; j < nc; ++j) m(i, j) -= q * m(row, j);
                if (U)
                    for (std::size_t j = 0; j < U->cols(); ++j) (*U)(i, j) -= q * (*U)(row, j);
                if (m(i, col) != 0) cleared = false;
            }
            if (cleared) break;
        }
        if (m(row, col) == 0) continue;
        if (m(row, col) < 0) {
            for (std::size_t j = 0; j < nc; ++j) m(row, j) = -m(row, j);
            if (U)
                for (std::size_t j = 0; j < U->cols(); ++j) (*U)(row, j) = -(*U)(row, j);
        }
        // Reduce entries above the pivot into [0, pivot).
        for (std::size_t i = 0; i < row; ++i) {
            mpz_class q;
            mpz_fdiv_q(q.get_mpz_t(), m(i, col).get_mpz_t(), m(row, col).get_mpz_t());
            if (q == 0) continue;
            for (std::size_t j = 0; j < nc; ++j) m(i, j) -= q * m(row, j);
            if (U)
                for (std::size_t j = 0; j < U->cols(); ++j) (*U)(i, j) -= q * (*U)(row, j);
        }
        ++row;
    }
    return row;
}

}  // namespace

IntMatrix hnf(const IntMatrix& A) {
    IntMatrix m(A);
    std::size_t r = hnf_inplace(m, nullptr);
    IntMatrix out(r, A.cols());
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < A.cols(); ++j) out(i, j) = m(i, j);
    return out;
}

IntMatrix hnf_with_transform(const IntMatrix& A, IntMatrix& U) {
    IntMatrix m(A);
    U = IntMatrix::identity(A.rows());
    std::size_t r = hnf_inplace(m, &U);
    IntMatrix h(r, A.cols());
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < A.cols(); ++j) h(i, j) = m(i, j);
    return h;
}

IntMatrix hnf_mod(const IntMatrix& A, const mpz_class& d) {
    std::size_t n = A.cols();
    if (d <= 0) throw std::invalid_argument("hnf_mod: modulus must be positive");
    // Work on A with entries reduced mod d, then append d*I: the row lattice
    // is unchanged because d*Z^n is contained in it.
    IntMatrix m(A.rows() + n, n);
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = 0; j < n; ++j) mpz_fdiv_r(m(i, j).get_mpz_t(), A(i, j).get_mpz_t(), d.get_mpz_t());
    for (std::size_t j = 0; j < n; ++j) m(A.rows() + j, j) = d;
    std::size_t r = hnf_inplace(m, nullptr);
    if (r != n) throw std::logic_error("hnf_mod: lattice not of full rank");
    IntMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out(i, j) = m(i, j);
    return out;
}

SmithResult smith_normal_form(const IntMatrix& A) {
    std::size_t nr = A.rows(), nc = A.cols();
    SmithResult res{A, IntMatrix::identity(nr), IntMatrix::identity(nc)};
    IntMatrix& S = res.S;
    IntMatrix& U = res.U;
    IntMatrix& V = res.V;

    auto row_op = [&](std::size_t i, std::size_t k, const mpz_class& q) {  // row i -= q*row k
        for (std::size_t j = 0; j < nc; ++j) S(i, j) -= q * S(k, j);
        for (std::size_t j = 0; j < nr; ++j) U(i, j) -= q * U(k, j);
    };
    auto col_op = [&](std::size_t j, std::size_t k, const mpz_class& q) {  // col j -= q*col k
        for (std::size_t i = 0; i < nr; ++i) S(i, j) -= q * S(i, k);
        for (std::size_t i = 0; i < nc; ++i) V(i, j) -= q * V(i, k);
    };
    auto row_swap = [&](std::size_t i, std::size_t k) {
        for (std::size_t j = 0; j < nc; ++j) std::swap(S(i, j), S(k, j));
        for (std::size_t j = 0; j < nr; ++j) std::swap(U(i, j), U(k, j));
    };
    auto col_swap = [&](std::size_t j, std::size_t k) {
        for (std::size_t i = 0; i < nr; ++i) std::swap(S(i, j), S(i, k));
        for (std::size_t i = 0; i < nc; ++i) std::swap(V(i, j), V(i, k));
    };

    std::size_t t = 0;
    for (; t < nr && t < nc; ++t) {
        // Smallest |nonzero| pivot in the trailing block.
        std::size_t pi = nr, pj = nc;
        for (std::size_t i = t; i < nr; ++i)
            for (std::size_t j = t; j < nc; ++j)
                if (S(i, j) != 0 &&
                    (pi == nr || mpz_cmpabs(S(i, j).get_mpz_t(), S(pi, pj).get_mpz_t()) < 0)) {
                    pi = i;
                    pj = j;
                }
        if (pi == nr) break;
        if (pi != t) row_swap(t, pi);
        if (pj != t) col_swap(t, pj);

        bool again = true;
        while (again) {
            again = false;
            for (std::size_t i = t + 1; i < nr; ++i) {
                if (S(i, t) == 0) continue;
                mpz_class q = S(i, t) / S(t, t);
                if (q != 0) row_op(i, t, q);
                if (S(i, t) != 0) {
                    row_swap(t, i);
                    again = true;
                }
            }
            for (std::size_t j = t + 1; j < nc; ++j) {
                if (S(t, j) == 0) continue;
                mpz_class q = S(t, j) / S(t, t);
                if (q != 0) col_op(j, t, q);
                if (S(t, j) != 0) {
                    col_swap(t, j);
                    again = true;
                }
            }
            if (!again) {
                // Enforce divisibility of the trailing block by the pivot.
                for (std::size_t i = t + 1; i < nr && !again; ++i)
                    for (std::size_t j = t + 1; j < nc && !again; ++j)
                        if (S(i, j) % S(t, t) != 0) {
                            mpz_class mone = -1;
                            row_op(t, i, mone);  // add row i to row t
                            again = true;
                        }
            }
        }
        if (S(t, t) < 0) {
            for (std::size_t j = 0; j < nc; ++j) S(t, j) = -S(t, j);
            for (std::size_t j = 0; j < nr; ++j) U(t, j) = -U(t, j);
        }
    }
    return res;
}

std::vector<mpz_class> cokernel_invariants(const IntMatrix& relations) {
    SmithResult sr = smith_normal_form(relations);
    std::size_t n = relations.cols();
    std::size_t r = std::min(relations.rows(), n);
    std::vector<mpz_class> inv;
    std::size_t rank = 0;
    for (std::size_t i = 0; i < r; ++i)
        if (sr.S(i, i) != 0) {
            ++rank;
            if (sr.S(i, i) != 1) inv.push_back(sr.S(i, i));
        }
    for (std::size_t i = rank; i < n; ++i) inv.push_back(0);
    return inv;
}

std::size_t fp_rank(const IntMatrix& A, const mpz_class& p) {
    std::size_t nr = A.rows(), nc = A.cols();
    std::vector<mpz_class> m(nr * nc);
    for (std::size_t i = 0; i < nr; ++i)
        for (std::size_t j = 0; j < nc; ++j)
            mpz_fdiv_r(m[i * nc + j].get_mpz_t(), A(i, j).get_mpz_t(), p.get_mpz_t());
    std::size_t rank = 0;
    for (std::size_t col = 0; col < nc && rank < nr; ++col) {
        std::size_t piv = nr;
        for (std::size_t i = rank; i < nr; ++i)
            if (m[i * nc + col] != 0) {
                piv = i;
                break;
            }
        if (piv == nr) continue;
        for (std::size_t j = 0; j < nc; ++j) std::swap(m[rank * nc + j], m[piv * nc + j]);
        mpz_class inv;
        mpz_invert(inv.get_mpz_t(), m[rank * nc + col].get_mpz_t(), p.get_mpz_t());
        for (std::size_t i = rank + 1; i < nr; ++i) {
            if (m[i * nc + col] == 0) continue;
            mpz_class f = (m[i * nc + col] * inv) % p;
            for (std::size_t j = col; j < nc; ++j)
                m[i * nc + j] = ((m[i * nc + j] - f * m[rank * nc + j]) % p + p) % p;
        }
        ++rank;
    }
    return rank;
}

IntMatrix left_kernel(const IntMatrix& A) {
    // Row-reduce [A | I]; kernel rows are those whose A-part vanished.
    std::size_t nr = A.rows(), nc = A.cols();
    IntMatrix m(A);
    IntMatrix U = IntMatrix::identity(nr);
    std::size_t r = hnf_inplace(m, &U);
    IntMatrix ker(nr - r, nr);
    for (std::size_t i = r; i < nr; ++i)
        for (std::size_t j = 0; j < nr; ++j) ker(i - r, j) = U(i, j);
    return hnf(ker);
}

bool solve_left(const IntMatrix& A, const std::vector<mpz_class>& b, std::vector<mpz_class>& x) {
    // x A = b  <=>  row vector b lies in the row lattice of A; track transforms.
    std::size_t nr = A.rows(), nc = A.cols();
    if (b.size() != nc) throw std::invalid_argument("solve_left: size mismatch");
    IntMatrix m(A);
    IntMatrix U = IntMatrix::identity(nr);
    std::size_t r = hnf_inplace(m, &U);
    std::vector<mpz_class> coef(r, 0), rem(b);
    for (std::size_t i = 0; i < r; ++i) {
        std::size_t col = 0;
        while (col < nc && m(i, col) == 0) ++col;
        if (col == nc) break;
        if (rem[col] % m(i, col) != 0) return false;
        mpz_class q = rem[col] / m(i, col);
        coef[i] = q;
        for (std::size_t j = 0; j < nc; ++j) rem[j] -= q * m(i, j);
    }
    for (std::size_t j = 0; j < nc; ++j)
        if (rem[j] != 0) return false;
    x.assign(nr, 0);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < nr; ++j) x[j] += coef[i] * U(i, j);
    return true;
}

bool solve_left_rational(const IntMatrix& A, const std::vector<mpq_class>& b,
                         std::vector<mpq_class>& x) {
    // Gaussian elimination over Q on [A^T | b^T] treating x A = b as A^T x^T = b^T.
    std::size_t nr = A.rows(), nc = A.cols();
    if (b.size() != nc) throw std::invalid_argument("solve_left_rational: size mismatch");
    std::vector<std::vector<mpq_class>> m(nc, std::vector<mpq_class>(nr + 1));
    for (std::size_t i = 0; i < nc; ++i) {
        for (std::size_t j = 0; j < nr; ++j) m[i][j] = mpq_class(A(j, i));
        m[i][nr] = b[i];
    }
    std::vector<std::size_t> pivcol(nc, nr);
    std::size_t rank = 0;
    for (std::size_t col = 0; col < nr && rank < nc; ++col) {
        std::size_t piv = nc;
        for (std::size_t i = rank; i < nc; ++i)
            if (m[i][col] != 0) {
                piv = i;
                break;
            }
        if (piv == nc) continue;
        std::swap(m[rank], m[piv]);
        mpq_class d = m[rank][col];
        for (std::size_t j = col; j <= nr; ++j) m[rank][j] /= d;
        for (std::size_t i = 0; i < nc; ++i) {
            if (i == rank || m[i][col] == 0) continue;
            mpq_class f = m[i][col];
            for (std::size_t j = col; j <= nr; ++j) m[i][j] -= f * m[rank][j];
        }
        pivcol[rank] = col;
        ++rank;
    }
    for (std::size_t i = rank; i < nc; ++i)
        if (m[i][nr] != 0) return false;
    x.assign(nr, 0);
    for (std::size_t i = 0; i < rank; ++i) x[pivcol[i]] = m[i][nr];
    return true;
}

IntMatrix mod_preimage_lattice(const IntMatrix& B, const mpz_class& e) {
    // {x : x B = 0 mod e}, one column (congruence) at a time.  L holds a basis
    // of the solution lattice for the columns processed so far; it always
    // contains e Z^n, so after each HNF every entry is reduced below e and no
    // transform blow-up can occur (unlike an SNF of the full matrix).
    std::size_t n = B.rows();
    IntMatrix L = IntMatrix::identity(n);
    for (std::size_t c = 0; c < B.cols(); ++c) {
        IntMatrix col(n + 1, 1);
        bool allzero = true;
        for (std::size_t i = 0; i < n; ++i) {
            mpz_class s = 0;
            for (std::size_t j = 0; j < n; ++j)
                if (L(i, j) != 0 && B(j, c) != 0) s += L(i, j) * B(j, c);
            mpz_fdiv_r(s.get_mpz_t(), s.get_mpz_t(), e.get_mpz_t());
            col(i, 0) = s;
            if (s != 0) allzero = false;
        }
        if (allzero) continue;
        col(n, 0) = e;
        // {y : y . v = 0 mod e} as the y-part of the kernel of [v; e].
        IntMatrix K = left_kernel(col);
        IntMatrix NL(K.rows() + n, n);
        for (std::size_t i = 0; i < K.rows(); ++i)
            for (std::size_t j = 0; j < n; ++j) {
                mpz_class s = 0;
                for (std::size_t k = 0; k < n; ++k)
                    if (K(i, k) != 0 && L(k, j) != 0) s += K(i, k) * L(k, j);
                NL(i, j) = s;
            }
        for (std::size_t i = 0; i < n; ++i) NL(K.rows() + i, i) = e;
        L = hnf(NL);
        if (L.rows() != n) throw std::logic_error("mod_preimage_lattice: rank drop");
    }
    return L;
}

IntMatrix lattice_intersection(const IntMatrix& A, const IntMatrix& B) {
    // Zassenhaus-style: rows x of A-lattice with x also in B-lattice.
    // Solve u A = v B  <=>  (u, -v) [A; B] = 0; intersection = {u A}.
    std::size_t n = A.cols();
    if (B.cols() != n) throw std::invalid_argument("lattice_intersection: ambient mismatch");
    IntMatrix st = A.vstack(B);
    IntMatrix ker = left_kernel(st);
    IntMatrix out(ker.rows(), n);
    for (std::size_t i = 0; i < ker.rows(); ++i)
        for (std::size_t j = 0; j < n; ++j) {
            mpz_class s = 0;
            for (std::size_t k = 0; k < A.rows(); ++k) s += ker(i, k) * A(k, j);
            out(i, j) = s;
        }
    return hnf(out);
}

bool in_row_lattice(const IntMatrix& H, const std::vector<mpz_class>& v) {
    std::vector<mpz_class> x;
    return solve_left(H, v, x);
}

IntMatrix inverse_unimodular(const IntMatrix& M) {
    std::size_t n = M.rows();
    if (M.cols() != n) throw std::invalid_argument("inverse_unimodular: not square");
    IntMatrix inv(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<mpz_class> e(n, 0), x;
        e[i] = 1;
        if (!solve_left(M, e, x)) throw std::invalid_argument("inverse_unimodular: not unimodular");
        for (std::size_t j = 0; j < n; ++j) inv(i, j) = x[j];
    }
    return inv;
}

}  // namespace cft::exact
