#pragma once
// Independent finite-group-cohomology oracle: dense F_p cochains on small
// explicit p-groups, inhomogeneous coboundaries with module action, cup
// products, Dwyer Massey products, the twisted-module (V_y) description of
// triple products, the half-cup identity, and the Bockstein.  Everything is
// computed by unarguable linear algebra on full cochain spaces; degree-3
// evaluations are pointwise so groups up to order 3^5 stay tractable.

#include <cstdint>
#include <optional>
#include <vector>

#include "cftower/exact/int_matrix.hpp"

namespace cft::gcoh {

using exact::IntMatrix;

struct CupNonzero : std::runtime_error {
    explicit CupNonzero(const std::string& m) : std::runtime_error(m) {}
};

struct FiniteGroupTable {
    unsigned n = 0;   // order
    unsigned id = 0;  // identity index
    std::vector<std::vector<unsigned>> mul;

    unsigned inv(unsigned g) const;
    // Associativity on 1000 random triples plus existence of all inverses.
    void spot_check(std::uint64_t seed = 1) const;

    static FiniteGroupTable cyclic(unsigned m);
    // Index of (a, b) is a * B.n + b; characters of the factors pull back.
    static FiniteGroupTable product(const FiniteGroupTable& A, const FiniteGroupTable& B);
    // (a,b,c) with (a,b,c)(a',b',c') = (a+a', b+b', c+c'+a*b'), index
    // a*p^2 + b*p + c; exponent p for odd p.
    static FiniteGroupTable heisenberg(unsigned p);
};

// Values of an n-cochain G^degree -> F_p^dim, stored flat: degree 1 at
// g*dim + c, degree 2 at (g*n + h)*dim + c, degree 3 analogously.
struct Cochain {
    unsigned degree = 1;
    unsigned dim = 1;
    std::vector<mpz_class> v;
};

// Coefficient module: F_p^dim with an action matrix per group element.
struct Coefficients {
    mpz_class p;
    unsigned dim = 1;
    std::vector<IntMatrix> act;  // act[g] is dim x dim over F_p

    static Coefficients trivial(const FiniteGroupTable& G, const mpz_class& p);
    // V_y = F_p^2 with g |-> [[1, y(g)], [0, 1]]; requires y a 1-cocycle.
    static Coefficients twist(const FiniteGroupTable& G, const mpz_class& p, const Cochain& y);
};

// Standard inhomogeneous coboundary with module action (degree 0, 1 or 2;
// degree 2 materializes all n^3 triples, keep to small groups).
Cochain coboundary(const FiniteGroupTable& G, const Coefficients& M, const Cochain& c);
// Pointwise d(c) = 0 check without materializing degree 3 (degree 1 or 2).
bool is_cocycle(const FiniteGroupTable& G, const Coefficients& M, const Cochain& c);

// (x cup w)(g, h) = x(g) * (g . w(h)), x a scalar 1-cochain.
Cochain cup(const FiniteGroupTable& G, const Coefficients& M, const Cochain& x, const Cochain& w);

// Matrix of d^1 : C^1(G, M) -> C^2(G, M) on the standard bases (rows =
// domain basis vectors).
IntMatrix d1_matrix(const FiniteGroupTable& G, const Coefficients& M);

// k with d(k) = f (degree-2 target); nullopt when f is not a coboundary.
std::optional<Cochain> trivialize(const FiniteGroupTable& G, const Coefficients& M,
                                  const Cochain& f);
// [a] = [b] in H^2(G, M).
bool cohomologous2(const FiniteGroupTable& G, const Coefficients& M, const Cochain& a,
                   const Cochain& b);

// Representatives of a basis of H^1(G, F_p) = Hom(G, Z/p).
std::vector<Cochain> h1_basis(const FiniteGroupTable& G, const mpz_class& p);

// A Massey "set": representative 2-cocycle plus a basis of the indeterminacy
// subspace, all scalar-valued; the set is rep + span(ind) + coboundaries.
struct MasseySet {
    Cochain rep;
    std::vector<Cochain> ind;
};
bool set_contains(const FiniteGroupTable& G, const mpz_class& p, const MasseySet& S,
                  const Cochain& c);
bool sets_equal(const FiniteGroupTable& G, const mpz_class& p, const MasseySet& A,
                const MasseySet& B);

// Dwyer: rep(g,h) = x(g) k_yz(h) + k_xy(g) z(h) with d k_xy = -x cup y,
// d k_yz = -y cup z; indeterminacy x cup H^1 + H^1 cup z.
MasseySet massey_dwyer(const FiniteGroupTable& G, const mpz_class& p, const Cochain& x,
                       const Cochain& y, const Cochain& z);
// Every representative over all trivializing pairs modulo nothing: the k's
// range over one solution plus all of Z^1 (coboundary shifts change the rep
// by a coboundary and are omitted).  For set-equality enumeration tests.
std::vector<Cochain> massey_dwyer_all(const FiniteGroupTable& G, const mpz_class& p,
                                      const Cochain& x, const Cochain& y, const Cochain& z);

// Twisted description: rep = first coordinate of x cup w_z - w_x cup z with
// w_x = (t_x, x), w_z = (t_z, z) lifts into V_y; indeterminacy
// x cup H^1 + H^1 cup z + y cup H^1 (the last from varying the preimage).
MasseySet massey_via_twist(const FiniteGroupTable& G, const mpz_class& p, const Cochain& x,
                           const Cochain& y, const Cochain& z);

// The explicit 1-cochain (1/2)(-t_y, t_y) in C^1(G, V_x) whose coboundary is
// x cup w_y - w_x cup y - (1/2) x cup w_y, with t_x = x(x-1)/2; verified
// pointwise (throws std::logic_error on failure).  t_y must trivialize
// -x cup y.
Cochain half_cup_witness(const FiniteGroupTable& G, const mpz_class& p, const Cochain& x,
                         const Cochain& y, const Cochain& t_y);

// Connecting map of 0 -> Z/p -> Z/p^2 -> Z/p -> 0 at the cochain level.
Cochain bockstein(const FiniteGroupTable& G, const mpz_class& p, const Cochain& x);

}  // namespace cft::gcoh
