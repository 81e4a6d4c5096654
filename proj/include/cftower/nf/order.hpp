#pragma once
// Orders in number fields: integral bases over the power basis, element
// arithmetic through the multiplication table, Round-2 maximal orders, and
// prime decomposition via the splitting of O/qO.

#include <gmpxx.h>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "cftower/exact/int_matrix.hpp"
#include "cftower/exact/poly.hpp"

namespace cft::nf {

using exact::IntMatrix;
using exact::ZPoly;

struct ReduciblePolynomial : std::runtime_error {
    explicit ReduciblePolynomial(const std::string& m) : std::runtime_error(m) {}
};

// Element coordinates with respect to an order's integral basis: num/den,
// den > 0, gcd(content(num), den) = 1.
struct NfElem {
    std::vector<mpz_class> num;
    mpz_class den{1};
};

class NumberFieldOrder {
public:
    // Construct the order with Z-basis rows of basis_num / basis_den written
    // in the power basis of f (monic irreducible over Z).  Throws if the
    // basis is not multiplicatively closed.
    NumberFieldOrder(ZPoly f, IntMatrix basis_num, mpz_class basis_den);

    std::size_t degree() const { return n_; }
    const ZPoly& defining_polynomial() const { return f_; }
    const IntMatrix& basis_num() const { return basis_num_; }
    const mpz_class& basis_den() const { return basis_den_; }
    const mpz_class& discriminant() const { return disc_; }
    // Index of Z[theta] in this order.
    const mpz_class& index() const { return index_; }
    // Multiplication table: row j of mult(i) holds the basis coordinates of b_i * b_j.
    const IntMatrix& mult(std::size_t i) const { return mult_[i]; }

    NfElem zero() const;
    NfElem one() const;
    NfElem from_int(const mpz_class& v) const;
    // theta = root of f, expressed in the integral basis (may be fractional
    // in pathological orders; here basis always contains Z[theta]).
    NfElem theta() const;

    NfElem add(const NfElem& x, const NfElem& y) const;
    NfElem sub(const NfElem& x, const NfElem& y) const;
    NfElem neg(const NfElem& x) const;
    NfElem mul(const NfElem& x, const NfElem& y) const;
    NfElem mul_int(const NfElem& x, const mpz_class& c) const;
    NfElem pow(const NfElem& x, mpz_class e) const;  // e >= 0
    NfElem inverse(const NfElem& x) const;
    bool is_zero(const NfElem& x) const;
    bool eq(const NfElem& x, const NfElem& y) const;

    mpq_class norm(const NfElem& x) const;
    mpq_class trace(const NfElem& x) const;

    // Matrix of multiplication by x on the integral basis (row j = basis
    // coordinates of x * b_j), returned as integer matrix over common
    // denominator x.den.
    IntMatrix mul_matrix(const NfElem& x) const;

    // Coordinates of x in the power basis (as rationals).
    std::vector<mpq_class> to_power_basis(const NfElem& x) const;
    NfElem from_power_basis(const std::vector<mpq_class>& c) const;

    std::string elem_str(const NfElem& x) const;

private:
    ZPoly f_;
    std::size_t n_;
    IntMatrix basis_num_;
    mpz_class basis_den_;
    IntMatrix basis_inv_num_;  // (basis_num/basis_den)^{-1} = basis_inv_num / basis_inv_den
    mpz_class basis_inv_den_;
    std::vector<IntMatrix> mult_;
    mpz_class disc_;
    mpz_class index_;

    static NfElem canon(NfElem x);
};

// Round-2 maximal order of Q[t]/(f), f monic irreducible.  extra_primes, if
// given, are additional primes at which maximality is enforced (used when the
// caller already knows the prime support of the index).
NumberFieldOrder maximal_order(const ZPoly& f, const std::vector<mpz_class>& extra_primes = {});

// Enlarge O by Round-2 until it is q-maximal at each of the given primes; no
// discriminant factorization is attempted, so the caller must know the prime
// support of the index (e.g. tensor-product orders of compositum fields).
NumberFieldOrder maximalize_at(NumberFieldOrder O, const std::vector<mpz_class>& primes);

// Prime support of |v| by trial division and Pollard-Brent; throws when a
// composite cofactor resists the rho budget.
std::vector<mpz_class> prime_factor_support(const mpz_class& v);

// Certify irreducibility of monic f over Q by intersecting subset-sum degree
// patterns of factorizations modulo several primes.  Returns false only when
// no certificate was found within the prime budget.
bool certify_irreducible(const ZPoly& f);

struct PrimeFactorSlot {
    mpz_class q;
    unsigned e = 0;  // ramification index
    unsigned f = 0;  // residue degree
    IntMatrix hnf;   // HNF basis of the prime ideal w.r.t. the order basis
};

// Decompose (q) in O (O must be q-maximal): nilradical of O/qO by Frobenius,
// then Berlekamp splitting of the semisimple quotient into fields.
// Ramification indices are recovered by valuation and the product of the
// prime powers is verified to equal (q).
std::vector<PrimeFactorSlot> factor_prime(const NumberFieldOrder& O, const mpz_class& q);

}  // namespace cft::nf
