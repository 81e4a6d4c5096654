#pragma once
// Dense exact integer matrices over GMP with the normal-form algorithms
// (Hermite, Smith) used everywhere else in the library.

#include <gmpxx.h>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace cft::exact {

class IntMatrix {
public:
    IntMatrix() : nr_(0), nc_(0) {}
    IntMatrix(std::size_t r, std::size_t c) : nr_(r), nc_(c), a_(r * c) {}
    IntMatrix(std::size_t r, std::size_t c, std::vector<mpz_class> entries)
        : nr_(r), nc_(c), a_(std::move(entries)) {
        if (a_.size() != r * c) throw std::invalid_argument("IntMatrix: entry count mismatch");
    }

    static IntMatrix identity(std::size_t n);
    static IntMatrix from_longs(std::size_t r, std::size_t c, const std::vector<long>& e);

    std::size_t rows() const { return nr_; }
    std::size_t cols() const { return nc_; }
    const mpz_class& operator()(std::size_t i, std::size_t j) const { return a_[i * nc_ + j]; }
    mpz_class& operator()(std::size_t i, std::size_t j) { return a_[i * nc_ + j]; }

    bool operator==(const IntMatrix& o) const { return nr_ == o.nr_ && nc_ == o.nc_ && a_ == o.a_; }
    bool operator!=(const IntMatrix& o) const { return !(*this == o); }

    IntMatrix operator*(const IntMatrix& o) const;
    IntMatrix operator+(const IntMatrix& o) const;
    IntMatrix operator-(const IntMatrix& o) const;
    IntMatrix operator-() const;
    IntMatrix transpose() const;
    bool is_zero() const;

    // Stack other's rows below this matrix (column counts must agree).
    IntMatrix vstack(const IntMatrix& other) const;
    // Place other's columns to the right of this matrix (row counts must agree).
    IntMatrix hstack(const IntMatrix& other) const;

    mpz_class det() const;  // fraction-free (Bareiss); square matrices only

    std::string to_string() const;

private:
    std::size_t nr_, nc_;
    std::vector<mpz_class> a_;
};

// Row-style Hermite normal form: returns H row-equivalent to A (unimodular row
// ops), echelon with positive pivots and entries above each pivot reduced into
// [0, pivot).  Zero rows are dropped, so H has rank(A) rows.
IntMatrix hnf(const IntMatrix& A);

// As hnf(), but also reports the unimodular row transform: U is square
// (A.rows() x A.rows()), |det U| = 1, and the first rank rows of U*A are the
// returned HNF rows.
IntMatrix hnf_with_transform(const IntMatrix& A, IntMatrix& U);

// HNF of a full-rank n-row lattice given a known positive multiple d of the
// absolute determinant of the lattice; works modulo d so entries stay small.
// A may have >= n rows but must span a finite-index sublattice of Z^n.
IntMatrix hnf_mod(const IntMatrix& A, const mpz_class& d);

struct SmithResult {
    IntMatrix S;  // diagonal, d_i >= 0, d_i | d_{i+1}
    IntMatrix U;  // rows() x rows(), |det| = 1
    IntMatrix V;  // cols() x cols(), |det| = 1,  U*A*V = S
};

// Smith normal form with transforms; pivot selection takes a smallest
// nonzero |entry| in the remaining block to limit coefficient growth.
SmithResult smith_normal_form(const IntMatrix& A);

// Invariant factors of Z^cols / (row lattice of `relations`): the SNF
// diagonal entries that are != 1, padded with one 0 per free rank.
std::vector<mpz_class> cokernel_invariants(const IntMatrix& relations);

// Rank of A over F_p.
std::size_t fp_rank(const IntMatrix& A, const mpz_class& p);

// Basis (as rows) of the left integer kernel {x : x A = 0}.
IntMatrix left_kernel(const IntMatrix& A);

// Solve x A = b over the integers; returns false if no integral solution.
bool solve_left(const IntMatrix& A, const std::vector<mpz_class>& b, std::vector<mpz_class>& x);

// Solve x A = b over the rationals (A need not be square; any solution).
// Returns false if inconsistent.
bool solve_left_rational(const IntMatrix& A, const std::vector<mpq_class>& b,
                         std::vector<mpq_class>& x);

// Basis (rows) of the lattice {x in Z^n : x B = 0 (mod e)} for B n x m, e > 0.
IntMatrix mod_preimage_lattice(const IntMatrix& B, const mpz_class& e);

// Intersection of the row lattices of A and B (both full column dimension n).
IntMatrix lattice_intersection(const IntMatrix& A, const IntMatrix& B);

// Is the (row) vector v in the row lattice spanned by HNF matrix H?
bool in_row_lattice(const IntMatrix& H, const std::vector<mpz_class>& v);

// Exact inverse of a matrix with determinant +-1.
IntMatrix inverse_unimodular(const IntMatrix& M);

}  // namespace cft::exact
