#pragma once
// Relative machinery over L_x/K: the embedding i_x, the norm N_x, the
// sigma-action on elements and ideals, constructive Hilbert 90, norm-equation
// solving, the (1-sigma)-decomposition of ideals, and the non-connected
// torsor algebra L_xx = L_x x ... x L_x (p copies) with its commuting
// sigma_x / sigma_y actions on the idempotent coordinates.
//
// Dictionary (divisor identities in the literature are written additively;
// everything here is multiplicative): sums -> products, (1-sigma)a ->
// a/sigma(a), p*a -> a^p, div(u) -> the principal fractional ideal (u).
// The dual-cocycle orientation used throughout:
//   sigma(b)/b = i_x(N(a)) / a^p,   div(b) * I^p = (1),
//   div(a) * i_x(J) * I/sigma(I) = (1).

#include <cstdint>

#include "cftower/nf/class_group.hpp"
#include "cftower/unram/unram.hpp"

namespace cft::rel {

using exact::IntMatrix;
using nf::ClassGroupNF;
using nf::FracIdeal;
using nf::NfElem;
using nf::NumberFieldOrder;
using quad::QuadElem;
using quad::QuadIdeal;
using unram::UnramifiedExtension;

struct NotANorm : std::runtime_error {
    explicit NotANorm(const std::string& m) : std::runtime_error(m) {}
};
struct SearchExhausted : std::runtime_error {
    explicit SearchExhausted(const std::string& m) : std::runtime_error(m) {}
};
struct ResolventDegenerate : std::runtime_error {
    explicit ResolventDegenerate(const std::string& m) : std::runtime_error(m) {}
};
struct ObstructionNonzero : std::runtime_error {
    ObstructionNonzero(const std::string& m, std::vector<mpz_class> w)
        : std::runtime_error(m), witness(std::move(w)) {}
    std::vector<mpz_class> witness;  // class exponents outside the subgroup
};
struct WitnessEquationFailed : std::runtime_error {
    WitnessEquationFailed(int eq, const std::string& m)
        : std::runtime_error("torsor witness equation (" + std::to_string(eq) + "): " + m),
          equation(eq) {}
    int equation;
};

// Prime ideals of O_K above ell, from the splitting of the minimal polynomial
// of w = (D + sqrt(D))/2 modulo ell.
struct QuadPrime {
    QuadIdeal P;
    unsigned e = 0, f = 0;
};
std::vector<QuadPrime> quad_primes_above(const mpz_class& D, const mpz_class& ell);

// P-adic valuation of the fractional ideal I at a prime P of O_K.
long quad_valuation(const QuadIdeal& P, const QuadIdeal& I);

class RelativeMaps {
public:
    explicit RelativeMaps(UnramifiedExtension E);

    const UnramifiedExtension& extension() const { return E_; }
    const NumberFieldOrder& L() const { return E_.L; }
    const mpz_class& p() const { return E_.p; }
    const mpz_class& D() const { return E_.D; }

    NfElem embed(const QuadElem& t) const;             // i_x on K^x
    FracIdeal extend_ideal(const QuadIdeal& J) const;  // i_x on Div(K)
    // Writes z = u + v*w when z lies in the image of K; false otherwise.
    bool retract(const NfElem& z, QuadElem& out) const;

    QuadElem norm_elem(const NfElem& a) const;  // N_x = prod_k sigma^k
    // N_x on divisors, pinned by the exact identity
    // extend_ideal(norm_ideal(I)) = prod_k sigma^k(I).
    QuadIdeal norm_ideal(const FracIdeal& I) const;
    // The O_K-ideal I intersect K (the descent of I when I is extended).
    QuadIdeal intersect_with_k(const FracIdeal& I) const;

    NfElem sigma(const NfElem& z, unsigned k = 1) const;
    FracIdeal sigma_ideal(const FracIdeal& I, unsigned k = 1) const;

    FracIdeal div(const NfElem& u) const;  // principal divisor of u

    // Gamma(a) = prod_{n=1}^{p-1} sigma^n(a)^{-n}; satisfies the operator
    // identity (1-sigma) Gamma = p - N, i.e. Gamma(a)/sigma(Gamma(a)) =
    // a^p / i_x(N(a)).
    NfElem gamma_op(const NfElem& a) const;

private:
    UnramifiedExtension E_;
    IntMatrix k_span_;    // 2 x n, rows = coordinates of 1 and of den_w * w
    mpz_class k_den_;     // denominator of the omega row
    IntMatrix k_compl_;   // n x (n-2) integer matrix with row-kernel = K-span
};

// Constructive Hilbert 90: for c with N(c) = 1, returns b != 0 with
// b / sigma(b) = c (this orientation is the fixed convention), built from the
// Poincare resolvent b = sum_k (prod_{j<k} sigma^j(c)) sigma^k(theta) over
// random small-height integral theta; at most 64 retries.
NfElem hilbert90(const RelativeMaps& R, const NfElem& c, std::uint64_t seed = 1);

// Solve N_x(a) = a_prime exactly.  cg must be the class group of R.L().
// Search order: prime-by-prime matching of ideals above supp(a_prime), then a
// class-group solve over norm-trivial correction ideals, then unit fixup.
NfElem solve_norm_element(const RelativeMaps& R, const ClassGroupNF& cg, const QuadElem& a_prime,
                          std::uint64_t seed = 1);

// I = div(u) * extend(Jp) * Ip/sigma(Ip), found via discrete logs in Cl(L_x)
// against the subgroup generated by extended classes and (1-sigma)-classes.
struct IdealDecomposition {
    NfElem u;
    QuadIdeal Jp;
    FracIdeal Ip;
};
IdealDecomposition decompose_ideal(const RelativeMaps& R, const ClassGroupNF& cg,
                                   const quad::ClassGroupQF& GK, const FracIdeal& I);

// Elements and divisors of the torsor algebra, as p idempotent coordinates.
struct TorsorElem {
    std::vector<NfElem> c;
};
struct TorsorDiv {
    std::vector<FracIdeal> c;
};

class TorsorAlgebra {
public:
    explicit TorsorAlgebra(const RelativeMaps& R);

    const RelativeMaps& maps() const { return *R_; }
    std::size_t p() const { return p_; }

    TorsorElem one() const;
    TorsorElem i_y(const NfElem& a) const;  // a on every coordinate
    TorsorElem i_x(const NfElem& b) const;  // sigma^i(b) on coordinate i
    TorsorElem mul(const TorsorElem& u, const TorsorElem& v) const;
    TorsorElem inv(const TorsorElem& u) const;
    bool eq(const TorsorElem& u, const TorsorElem& v) const;
    TorsorElem sigma_x(const TorsorElem& u) const;  // sigma(c_{i-1}) at i
    TorsorElem sigma_y(const TorsorElem& u) const;  // c_{i+1} at i
    TorsorElem om_x(const TorsorElem& u) const;     // u / sigma_x(u)
    TorsorElem om_y(const TorsorElem& u) const;     // u / sigma_y(u)
    TorsorElem n_x(const TorsorElem& u) const;
    TorsorElem n_y(const TorsorElem& u) const;

    TorsorDiv unit_div() const;
    TorsorDiv div_of(const TorsorElem& u) const;
    TorsorDiv i_y(const FracIdeal& I) const;
    TorsorDiv i_x(const FracIdeal& I) const;
    TorsorDiv mul(const TorsorDiv& u, const TorsorDiv& v) const;
    TorsorDiv inv(const TorsorDiv& u) const;
    bool eq(const TorsorDiv& u, const TorsorDiv& v) const;
    TorsorDiv sigma_x(const TorsorDiv& u) const;
    TorsorDiv sigma_y(const TorsorDiv& u) const;
    TorsorDiv om_x(const TorsorDiv& u) const;
    TorsorDiv om_y(const TorsorDiv& u) const;
    TorsorDiv n_y(const TorsorDiv& u) const;

private:
    const RelativeMaps* R_;
    std::size_t p_;
};

// The explicit witnesses from the non-connected lemma, for a dual cocycle
// (b, a, J, I): b1 = (b^{-1}, 1, ..., 1),
// a1 = (1, sigma(a)/a * b, x_2, ..., x_{p-1}, 1) with
//   x_k = prod_{n=k+1}^{p-1} a/sigma^n(a),
// I1 = (I^{2-p}, I, 1, I^{-1}, ..., I^{-(p-3)}),
// J1 = I^{p(2-p)}, I2 = sigma(I), J2 = I^{-(p-2)} * sigma(I)^{p-4}.
struct TorsorWitnesses {
    TorsorElem b1, a1;
    TorsorDiv I1;
    FracIdeal J1, I2, J2;
};
TorsorWitnesses build_torsor_witnesses(const TorsorAlgebra& T, const NfElem& b, const NfElem& a,
                                       const FracIdeal& I);

// Verifies the dual-cocycle preconditions then replays the four defining
// equations of the witnesses exactly in the componentwise algebra:
//   (1) (1-sigma_x)(1-sigma_y) a1 = (1-sigma_x) i_y(a) * (1-sigma_x)^2 b1
//   (2) div(b1) * i_y(I)^{-1} * (1-sigma_y) I1 = (1)
//   (3) div(a1) * (1-sigma_x) I1 = i_y(J2) * i_x(I2)
//   (4) N_y(I1) = i_y(I^{p(p-1)/2} * J1)
// Throws WitnessEquationFailed naming the first failing equation.
void torsor_witness_check(const TorsorAlgebra& T, const NfElem& b, const NfElem& a,
                          const QuadIdeal& J, const FracIdeal& I, const TorsorWitnesses& W);
void torsor_witness_check(const TorsorAlgebra& T, const NfElem& b, const NfElem& a,
                          const QuadIdeal& J, const FracIdeal& I);

// For f with N_x(f) = N_y(f) = 1, produce gamma with
// f = (1-sigma_x)(1-sigma_y) gamma, by back-substitution along sigma_x, a
// norm-equation solve in L_x/K, and back-substitution along sigma_y.
TorsorElem kernel_intersection_check(const TorsorAlgebra& T, const ClassGroupNF& cg,
                                     const TorsorElem& f, std::uint64_t seed = 1);

}  // namespace cft::rel
