#pragma once
// Desk-scale class groups of number fields: factor-base relation search with
// generator bookkeeping, SNF structure, and principality tests that return
// exactly verified generators.

#include <cstdint>
#include <optional>

#include "cftower/nf/ideal.hpp"
#include "cftower/nf/lll.hpp"

namespace cft::nf {

struct RelationSearchExhausted : std::runtime_error {
    explicit RelationSearchExhausted(const std::string& m) : std::runtime_error(m) {}
};

struct PrimeIdealNF {
    mpz_class q;
    unsigned e = 0, f = 0;
    FracIdeal P;
    FracIdeal Pinv;  // cached inverse, used by valuations
};

struct BoundPolicy {
    bool grh_assumed = true;     // GRH bound 12 log^2 |disc|; else Minkowski
    long base_bound = 0;         // 0 = automatic working-base bound
    bool certify_generation = true;  // express every prime up to the full bound
                                     // in terms of the working base
    std::uint64_t seed = 1;
    long max_attempts = 0;  // 0 = automatic
};

struct ClassGroupNF {
    const NumberFieldOrder* O = nullptr;
    std::vector<PrimeIdealNF> factor_base;  // working base (norm <= base_bound)
    mpz_class full_bound;                   // GRH / Minkowski bound that was certified
    bool grh_assumed = true;
    bool generation_certified = false;

    IntMatrix rel_hnf;                     // HNF of the relation lattice (B x B)
    std::vector<std::vector<mpz_class>> rel_rows;  // raw relation rows
    std::vector<NfElem> rel_gens;                  // (rel_gens[i]) = prod P^rel_rows[i]
    exact::SmithResult snf;                        // SNF of rel_hnf
    std::vector<mpz_class> invariants;             // nontrivial invariant factors
    mpz_class h;                                   // class number (heuristic completeness)
};

mpz_class grh_factor_base_bound(const mpz_class& disc);
mpz_class minkowski_bound(const NumberFieldOrder& O);

ClassGroupNF class_group_nf(const NumberFieldOrder& O, const BoundPolicy& policy = {});

// Exponent vector of the class of integral ideal I over the working factor
// base: finds alpha with (alpha) = I * prod P^v and returns (v, alpha).
struct SmoothDecomposition {
    std::vector<mpz_class> exponents;
    NfElem alpha;
};
SmoothDecomposition smooth_decompose(const ClassGroupNF& cg, const FracIdeal& I,
                                     std::uint64_t seed = 7);

struct PrincipalResult {
    bool principal = false;
    NfElem generator;                      // set iff principal; (generator) = I verified
    std::vector<mpz_class> class_exponents;  // coords in Z/d_i summands otherwise
};

PrincipalResult is_principal(const ClassGroupNF& cg, const FracIdeal& I);

// Coordinates of [I] in the invariant-factor decomposition (one entry per
// nontrivial invariant, reduced mod d_i).
std::vector<mpz_class> class_coordinates(const ClassGroupNF& cg, const FracIdeal& I);

// p-rank of the class group.
unsigned p_rank_nf(const ClassGroupNF& cg, const mpz_class& p);

}  // namespace cft::nf
