#pragma once
// Triple Massey products <x,x,y> for imaginary quadratic K and odd p via the
// ideal-theoretic formula: lift (a', J) to a dual cocycle (b, a, J, I) over
// L_x, decompose I = div(u) * i_x(J') * (1-sigma)I', and pair
//   <<x,x,y>, (a',J)> = y([J][N_x(I')])   (p = 3)
//                     = y([N_x(I')])      (p > 3).
// The global sign of the duality pairing is fixed by this orientation; a
// flip rescales every Zassenhaus entry by -1 and preserves rank/vanishing,
// which is all the tower classifier consumes.

#include <array>
#include <chrono>
#include <map>
#include <memory>
#include <mutex>

#include "cftower/rel/relative.hpp"

namespace cft::engine {

using nf::FracIdeal;
using nf::NfElem;
using quad::CharacterModP;
using quad::MuPClass;
using quad::QuadIdeal;

struct HypothesisViolated : std::runtime_error {
    explicit HypothesisViolated(const std::string& m) : std::runtime_error(m) {}
};
struct LiftObstructed : std::runtime_error {
    LiftObstructed(const std::string& m, std::vector<mpz_class> obs)
        : std::runtime_error(m), obstruction(std::move(obs)) {}
    std::vector<mpz_class> obstruction;  // mod-p divisor-class obstruction
};
struct BudgetExceeded : std::runtime_error {
    explicit BudgetExceeded(const std::string& m) : std::runtime_error(m) {}
};

// Asserts p odd prime and K = Q(sqrt(D)) imaginary quadratic with D a
// fundamental discriminant outside {-3, -4}.  In this regime every cup
// product on H^1 vanishes and the unit group is {+-1}, so triple Massey
// products are defined with zero indeterminacy (single-valued).
void hypothesis_guard(const mpz_class& D, const mpz_class& p);

struct DualCocycle {
    NfElem b, a;  // in L_x
    QuadIdeal J;  // Div(K)
    FracIdeal I;  // Div(L_x)
};

// Lift m = (a', J) to (b, a, J, I): a solves N_x(a) = a'; b solves
// sigma(b)/b = i_x(a')/a^p by constructive Hilbert 90, then is adjusted by
// t in K^x so that div(b) is a p-th power, pinned by a class-group solve in
// Cl(K) (the rough sigma-invariant part of div(b) is descended to K exactly,
// no factoring).  I = the (-1/p)-th power of div(b).  All three invariants
//   sigma(b)/b * a^p = i_x(N(a)),  div(b) * I^p = (1),
//   div(a) * i_x(J) * I/sigma(I) = (1)
// are verified exactly before returning.
DualCocycle lift_dual_cocycle(const rel::RelativeMaps& R, const nf::ClassGroupNF& cg,
                              const quad::ClassGroupQF& G, const MuPClass& m,
                              std::uint64_t seed = 1);

struct MasseyCertificate {
    mpz_class p, D;
    CharacterModP x, y;
    MuPClass argument;
    mpz_class value;  // in Z/p
    // Witnesses: replaying them through the formula reproduces `value`.
    NfElem a, b;
    FracIdeal I;
    NfElem u;
    QuadIdeal Jp;  // J' of the decomposition
    FracIdeal Ip;  // I' of the decomposition
    std::uint64_t choice_seed = 1;
};

// Recompute the value from the stored witnesses without re-searching: checks
// N_x(a) = a', the three dual-cocycle invariants, the decomposition identity
// I = div(u) * i_x(J') * I'/sigma(I'), and the pairing formula.  Throws
// std::logic_error on any mismatch; returns the (re)computed value.
mpz_class replay_certificate(const rel::RelativeMaps& R, const quad::ClassGroupQF& G,
                             const MasseyCertificate& c);

struct EngineOptions {
    // Per matrix-entry budget, checked at phase boundaries (field tower
    // build, class group, lift, decomposition); a single phase is not
    // interrupted mid-flight.
    double entry_budget_seconds = 300.0;
    nf::BoundPolicy class_group_policy{};
};

class MasseyEngine {
public:
    MasseyEngine(mpz_class D, mpz_class p,
                 std::vector<unram::ExtensionProviderRecord> provider = {},
                 EngineOptions opt = {});

    const mpz_class& D() const { return D_; }
    const mpz_class& p() const { return p_; }
    const quad::ClassGroupQF& class_group() const { return G_; }

    // <<x,x,y>, m> with certificate.  Requires x != 0; x cup y = 0 holds
    // automatically under hypothesis_guard.
    mpz_class massey_xxy(const CharacterModP& x, const CharacterModP& y, const MuPClass& m,
                         std::uint64_t seed = 1, MasseyCertificate* cert = nullptr);

    // Cached per-character contexts (L_x, relative maps, Cl(L_x)).
    const rel::RelativeMaps& maps_for(const CharacterModP& x);
    const nf::ClassGroupNF& class_group_for(const CharacterModP& x);

private:
    struct CharCtx {
        unram::UnramifiedExtension E;
        std::unique_ptr<rel::RelativeMaps> R;
        nf::ClassGroupNF cg;
    };
    CharCtx& ctx_for(const CharacterModP& x,
                     const std::chrono::steady_clock::time_point& deadline);

    mpz_class D_, p_;
    quad::ClassGroupQF G_;
    std::vector<unram::ExtensionProviderRecord> provider_;
    EngineOptions opt_;
    std::mutex mu_;
    std::map<std::vector<mpz_class>, std::unique_ptr<CharCtx>> ctx_;
};

// Columns <x,x,y> and <y,y,x> evaluated on the mu_p basis (e1, e2); entry
// (i, 0) = <<x,x,y>, e_{i+1}>, entry (i, 1) = <<y,y,x>, e_{i+1}>.
struct ZassenhausMatrix {
    mpz_class p, D;
    std::array<std::array<mpz_class, 2>, 2> entries;
    std::array<std::array<MasseyCertificate, 2>, 2> certificates;
    unsigned rank = 0;  // over F_p
};

// Requires the p-rank of Cl(K) to be exactly 2; (x, y) is the dual character
// basis, (e1, e2) the mu_p basis from the p-torsion generators.
ZassenhausMatrix zassenhaus_matrix(MasseyEngine& eng);
ZassenhausMatrix zassenhaus_matrix(const mpz_class& D, const mpz_class& p,
                                   const std::vector<unram::ExtensionProviderRecord>& provider = {},
                                   const EngineOptions& opt = {});

unsigned fp_rank2x2(const std::array<std::array<mpz_class, 2>, 2>& m, const mpz_class& p);

}  // namespace cft::engine
