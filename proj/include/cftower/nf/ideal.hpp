#pragma once
// Fractional ideals of a number field order in canonical HNF, with exact
// multiplication, inversion (colon ideal), norms and valuations.

#include "cftower/nf/order.hpp"

namespace cft::nf {

// Lattice num/den with num an n x n row-HNF basis w.r.t. the integral basis,
// den > 0, and gcd(content(num), den) = 1.
struct FracIdeal {
    IntMatrix num;
    mpz_class den{1};
};

FracIdeal fi_canon(FracIdeal I);
FracIdeal fi_unit(const NumberFieldOrder& O);
FracIdeal fi_from_elem(const NumberFieldOrder& O, const NfElem& x);
// Ideal generated by a list of elements (must span full rank).
FracIdeal fi_from_gens(const NumberFieldOrder& O, const std::vector<NfElem>& gens);

FracIdeal fi_mul(const NumberFieldOrder& O, const FracIdeal& A, const FracIdeal& B);
FracIdeal fi_mul_elem(const NumberFieldOrder& O, const FracIdeal& A, const NfElem& x);
FracIdeal fi_inv(const NumberFieldOrder& O, const FracIdeal& A);
FracIdeal fi_pow(const NumberFieldOrder& O, FracIdeal A, mpz_class e);  // e may be negative
// Ideal sum (gcd).
FracIdeal fi_add(const NumberFieldOrder& O, const FracIdeal& A, const FracIdeal& B);

mpq_class fi_norm(const NumberFieldOrder& O, const FracIdeal& A);
bool fi_is_integral(const FracIdeal& A);
bool fi_eq(const FracIdeal& A, const FracIdeal& B);
bool fi_contains(const FracIdeal& A, const FracIdeal& B);  // B subset of A
bool fi_contains_elem(const NumberFieldOrder& O, const FracIdeal& A, const NfElem& x);

// The basis elements of A (rows of num / den) as field elements.
std::vector<NfElem> fi_basis_elems(const NumberFieldOrder& O, const FracIdeal& A);

// P-adic valuation of A for a prime ideal P (P integral prime, A nonzero).
long fi_valuation(const NumberFieldOrder& O, const FracIdeal& P, const FracIdeal& A);

}  // namespace cft::nf
