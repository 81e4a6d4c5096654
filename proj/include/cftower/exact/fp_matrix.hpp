#pragma once
// Dense linear algebra over F_p on top of IntMatrix: entries are kept
// reduced into [0, p).  Used for radical/idempotent computations in orders
// and for cochain-level cohomology.

#include "cftower/exact/int_matrix.hpp"

namespace cft::exact {

IntMatrix fp_reduce_mat(const IntMatrix& A, const mpz_class& p);
IntMatrix fp_mat_mul(const IntMatrix& A, const IntMatrix& B, const mpz_class& p);
IntMatrix fp_mat_pow(IntMatrix A, mpz_class e, const mpz_class& p);

// Reduced row echelon form; returns pivot column indices.
IntMatrix fp_rref(const IntMatrix& A, const mpz_class& p, std::vector<std::size_t>* pivots = nullptr);

// Basis (rows) of {x in F_p^rows : x A = 0}.
IntMatrix fp_left_kernel_mat(const IntMatrix& A, const mpz_class& p);

// Solve x A = b over F_p; returns false if inconsistent.
bool fp_solve_left(const IntMatrix& A, const std::vector<mpz_class>& b,
                   std::vector<mpz_class>& x, const mpz_class& p);

// Inverse of a square matrix over F_p; throws std::invalid_argument if singular.
IntMatrix fp_inverse(const IntMatrix& A, const mpz_class& p);

}  // namespace cft::exact
