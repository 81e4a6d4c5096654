#pragma once
// Exact univariate polynomial arithmetic: over Q (with Sturm-sequence real
// root counting), over Z (resultants / discriminants), and over F_p
// (gcd, power maps, equal-degree factorization).

#include <gmpxx.h>
#include <cstddef>
#include <vector>

namespace cft::exact {

// Coefficients low-to-high; invariant: trimmed (no trailing zeros).
using QPoly = std::vector<mpq_class>;
using ZPoly = std::vector<mpz_class>;

QPoly qpoly_trim(QPoly f);
int qpoly_deg(const QPoly& f);  // -1 for zero polynomial
QPoly qpoly_add(const QPoly& f, const QPoly& g);
QPoly qpoly_sub(const QPoly& f, const QPoly& g);
QPoly qpoly_mul(const QPoly& f, const QPoly& g);
QPoly qpoly_scale(const QPoly& f, const mpq_class& c);
// Euclidean division: f = q*g + r with deg r < deg g.
void qpoly_divrem(const QPoly& f, const QPoly& g, QPoly& q, QPoly& r);
QPoly qpoly_gcd(QPoly f, QPoly g);  // monic gcd
QPoly qpoly_derivative(const QPoly& f);
mpq_class qpoly_eval(const QPoly& f, const mpq_class& x);

// Number of distinct real roots of f in the open interval (0, 1).
// Roots at the endpoints are excluded; multiplicities are not counted.
std::size_t count_roots_open_unit_interval(const QPoly& f);

int zpoly_deg(const ZPoly& f);
ZPoly zpoly_trim(ZPoly f);
ZPoly zpoly_add(const ZPoly& f, const ZPoly& g);
ZPoly zpoly_sub(const ZPoly& f, const ZPoly& g);
ZPoly zpoly_mul(const ZPoly& f, const ZPoly& g);
ZPoly zpoly_derivative(const ZPoly& f);
mpz_class zpoly_eval(const ZPoly& f, const mpz_class& x);
QPoly zpoly_to_q(const ZPoly& f);
// Resultant of f and g over Z (via the Sylvester matrix; degrees here are tiny).
mpz_class zpoly_resultant(const ZPoly& f, const ZPoly& g);
// disc(f) = (-1)^{n(n-1)/2} res(f, f') / lc(f).
mpz_class zpoly_discriminant(const ZPoly& f);

// --- F_p polynomials (p an odd prime fitting in mpz; coefficients in [0,p)) ---
struct FpPolyCtx {
    mpz_class p;
};
using FpPoly = std::vector<mpz_class>;

FpPoly fp_trim(FpPoly f);
FpPoly fp_reduce(const ZPoly& f, const FpPolyCtx& c);
FpPoly fp_mul(const FpPoly& f, const FpPoly& g, const FpPolyCtx& c);
FpPoly fp_rem(FpPoly f, const FpPoly& g, const FpPolyCtx& c);
FpPoly fp_gcd(FpPoly f, FpPoly g, const FpPolyCtx& c);  // monic
FpPoly fp_powmod(const FpPoly& base, mpz_class e, const FpPoly& mod, const FpPolyCtx& c);
FpPoly fp_monic(FpPoly f, const FpPolyCtx& c);

// Full factorization of a nonzero squarefree-or-not f over F_p:
// returns (irreducible monic factor, multiplicity) pairs.
std::vector<std::pair<FpPoly, unsigned>> fp_factor(const FpPoly& f, const FpPolyCtx& c);

// Roots of f in F_p (each listed once).
std::vector<mpz_class> fp_roots(const FpPoly& f, const FpPolyCtx& c);

}  // namespace cft::exact
