#include "cftower/engine/massey.hpp"

#include <algorithm>
#include <set>

#include "cftower/exact/fp_matrix.hpp"

namespace cft::engine {

using nf::NumberFieldOrder;
using quad::ClassGroupQF;
using quad::ideal_inverse;
using quad::ideal_mul;
using quad::ideal_pow;
using quad::principal_ideal;
using quad::QuadElem;
using quad::unit_ideal;

void hypothesis_guard(const mpz_class& D, const mpz_class& p) {
    if (p <= 2 || mpz_probab_prime_p(p.get_mpz_t(), 40) == 0)
        throw HypothesisViolated("p must be an odd prime, got " + p.get_str());
    if (D >= 0 || !quad::is_fundamental_discriminant(D))
        throw HypothesisViolated("D must be a negative fundamental discriminant, got " +
                                 D.get_str());
    if (D == -3 || D == -4)
        throw HypothesisViolated("D = " + D.get_str() + " has extra units (unit condition)");
}

namespace {

mpz_class mod_pos(const mpz_class& a, const mpz_class& m) {
    mpz_class r = a % m;
    if (r < 0) r += m;
    return r;
}

// z with p*z = target (mod d); fails exactly when p | d and p does not
// divide target.
bool solve_mod(const mpz_class& p, const mpz_class& target, const mpz_class& d, mpz_class& z) {
    mpz_class g = gcd(p, d);
    if (target % g != 0) return false;
    mpz_class pg = p / g, dg = d / g, inv;
    if (dg == 1) {
        z = 0;
        return true;
    }
    if (mpz_invert(inv.get_mpz_t(), pg.get_mpz_t(), dg.get_mpz_t()) == 0) return false;
    z = mod_pos((target / g) * inv, dg);
    return true;
}

}  // namespace

DualCocycle lift_dual_cocycle(const rel::RelativeMaps& R, const nf::ClassGroupNF& cg,
                              const ClassGroupQF& G, const MuPClass& m, std::uint64_t seed) {
    const NumberFieldOrder& O = R.L();
    const mpz_class& D = R.D();
    const mpz_class& p = R.p();

    if (!(ideal_mul(principal_ideal(D, m.a_prime), ideal_pow(m.J, p)) == unit_ideal(D)))
        throw std::invalid_argument("lift_dual_cocycle: (a') != J^{-p}");

    NfElem a = rel::solve_norm_element(R, cg, m.a_prime, seed);
    NfElem c = O.mul(R.embed(m.a_prime), O.inverse(O.pow(a, p)));
    NfElem b0 = O.eq(c, O.one()) ? O.one() : O.inverse(rel::hilbert90(R, c, seed));
    FracIdeal B0 = R.div(b0);

    // Support where div(b0) can vary along a sigma-orbit: primes above
    // supp(a') together with the factor base (solve_norm_element builds a
    // from these only).  Outside this set div(b0) is sigma-invariant, hence
    // an extended ideal, recovered below by exact descent.
    std::set<mpz_class> ells;
    mpq_class na = quad::qe_norm(m.a_prime, D);
    for (const auto& q : nf::prime_factor_support(na.get_num())) ells.insert(q);
    for (const auto& q : nf::prime_factor_support(na.get_den())) ells.insert(q);
    for (const auto& fb : cg.factor_base) ells.insert(fb.q);

    FracIdeal smooth = nf::fi_unit(O);   // the part of div(b0) on known primes
    FracIdeal i_root = nf::fi_unit(O);   // prod Q^{-s} over known primes
    QuadIdeal resid = unit_ideal(D);     // prod P^{r_P}, residues mod p
    for (const auto& ell : ells) {
        std::vector<nf::PrimeFactorSlot> slots = nf::factor_prime(O, ell);
        for (const auto& qp : rel::quad_primes_above(D, ell)) {
            FracIdeal ext = R.extend_ideal(qp.P);
            std::vector<FracIdeal> above;
            for (const auto& s : slots) {
                FracIdeal Q = nf::fi_canon(FracIdeal{s.hnf, 1});
                if (nf::fi_contains(Q, ext)) above.push_back(Q);
            }
            std::vector<long> vals;
            for (const auto& Q : above) vals.push_back(nf::fi_valuation(O, Q, B0));
            mpz_class r = mod_pos(vals[0], p);
            for (long v : vals)
                if (mod_pos(v, p) != r)
                    throw std::logic_error("lift_dual_cocycle: orbit residues differ at " +
                                           ell.get_str());
            for (std::size_t k = 0; k < above.size(); ++k) {
                if (vals[k] == 0) continue;
                smooth = nf::fi_mul(O, smooth, nf::fi_pow(O, above[k], vals[k]));
                mpz_class s = (mpz_class(vals[k]) - r) / p;
                if (s != 0) i_root = nf::fi_mul(O, i_root, nf::fi_pow(O, above[k], -s));
            }
            if (r != 0) resid = ideal_mul(resid, ideal_pow(qp.P, r));
        }
    }

    // Rough remainder: sigma-invariant, so it descends to K exactly.
    FracIdeal rough = nf::fi_mul(O, B0, nf::fi_inv(O, smooth));
    QuadIdeal E = R.intersect_with_k(rough);
    if (!nf::fi_eq(R.extend_ideal(E), rough))
        throw std::logic_error("lift_dual_cocycle: rough part of div(b) does not descend");

    // div(b0 * i_x(t)) = p-th power  <=>  (t) * E' = F^p for some F, where
    // E' = E * prod P^{r_P}: one p-divisibility solve in Cl(K).
    QuadIdeal Ep = ideal_mul(E, resid);
    std::vector<mpz_class> logE = G.class_log(Ep);
    const std::vector<mpz_class>& inv = G.invariant_factors();
    QuadIdeal F = unit_ideal(D);
    for (std::size_t i = 0; i < inv.size(); ++i) {
        mpz_class z;
        if (!solve_mod(p, logE[i], inv[i], z)) {
            std::vector<mpz_class> obs;
            for (const auto& e : logE) obs.push_back(mod_pos(e, p));
            throw LiftObstructed("lift_dual_cocycle: [div(b)] not p-divisible in Cl(K)", obs);
        }
        if (z != 0) F = ideal_mul(F, ideal_pow(quad::ideal_of_form(G.generators()[i]), z));
    }
    auto t = quad::principal_generator(ideal_mul(ideal_pow(F, p), ideal_inverse(Ep)));
    if (!t) throw std::logic_error("lift_dual_cocycle: adjustment ideal not principal");

    NfElem b = O.mul(b0, R.embed(*t));
    FracIdeal I = nf::fi_mul(O, i_root, nf::fi_inv(O, R.extend_ideal(F)));

    // Exact invariant checks.
    if (!O.eq(O.mul(R.sigma(b), O.pow(a, p)), O.mul(b, R.embed(R.norm_elem(a)))))
        throw std::logic_error("lift_dual_cocycle: sigma(b)/b != i_x(N(a))/a^p");
    if (!nf::fi_eq(nf::fi_mul(O, R.div(b), nf::fi_pow(O, I, p)), nf::fi_unit(O)))
        throw std::logic_error("lift_dual_cocycle: div(b) + pI != 0");
    FracIdeal third = nf::fi_mul(O, R.div(a), R.extend_ideal(m.J));
    third = nf::fi_mul(O, third, nf::fi_mul(O, I, nf::fi_inv(O, R.sigma_ideal(I))));
    if (!nf::fi_eq(third, nf::fi_unit(O)))
        throw std::logic_error("lift_dual_cocycle: div(a) + i_x(J) + (1-sigma)I != 0");

    return DualCocycle{b, a, m.J, I};
}

mpz_class replay_certificate(const rel::RelativeMaps& R, const ClassGroupQF& G,
                             const MasseyCertificate& c) {
    const NumberFieldOrder& O = R.L();
    QuadElem na = R.norm_elem(c.a);
    if (!(na.u == c.argument.a_prime.u && na.v == c.argument.a_prime.v))
        throw std::logic_error("certificate replay: N_x(a) != a'");
    if (!O.eq(O.mul(R.sigma(c.b), O.pow(c.a, R.p())), O.mul(c.b, R.embed(na))))
        throw std::logic_error("certificate replay: cocycle relation fails");
    if (!nf::fi_eq(nf::fi_mul(O, R.div(c.b), nf::fi_pow(O, c.I, R.p())), nf::fi_unit(O)))
        throw std::logic_error("certificate replay: div(b) + pI != 0");
    FracIdeal third = nf::fi_mul(O, R.div(c.a), R.extend_ideal(c.argument.J));
    third = nf::fi_mul(O, third, nf::fi_mul(O, c.I, nf::fi_inv(O, R.sigma_ideal(c.I))));
    if (!nf::fi_eq(third, nf::fi_unit(O)))
        throw std::logic_error("certificate replay: div(a) + i_x(J) + (1-sigma)I != 0");
    FracIdeal rec = nf::fi_mul(O, R.div(c.u), R.extend_ideal(c.Jp));
    rec = nf::fi_mul(O, rec, nf::fi_mul(O, c.Ip, nf::fi_inv(O, R.sigma_ideal(c.Ip))));
    if (!nf::fi_eq(rec, c.I))
        throw std::logic_error("certificate replay: decomposition of I fails");
    QuadIdeal arg = R.norm_ideal(c.Ip);
    if (c.p == 3) arg = ideal_mul(c.argument.J, arg);
    mpz_class v = c.y.eval(G, arg);
    if (v != c.value) throw std::logic_error("certificate replay: value mismatch");
    return v;
}

MasseyEngine::MasseyEngine(mpz_class D, mpz_class p,
                           std::vector<unram::ExtensionProviderRecord> provider,
                           EngineOptions opt)
    : D_(std::move(D)), p_(std::move(p)), G_(D_), provider_(std::move(provider)), opt_(opt) {
    hypothesis_guard(D_, p_);
}

MasseyEngine::CharCtx& MasseyEngine::ctx_for(
    const CharacterModP& x, const std::chrono::steady_clock::time_point& deadline) {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = ctx_.find(x.values_on_generators);
    if (it != ctx_.end()) return *it->second;
    auto ctx = std::unique_ptr<CharCtx>(
        new CharCtx{unram::build_extension(D_, p_, x, G_, provider_), nullptr, {}});
    if (std::chrono::steady_clock::now() > deadline)
        throw BudgetExceeded("massey: budget exhausted building L_x");
    ctx->R = std::make_unique<rel::RelativeMaps>(ctx->E);
    ctx->cg = nf::class_group_nf(ctx->R->L(), opt_.class_group_policy);
    auto [pos, ok] = ctx_.emplace(x.values_on_generators, std::move(ctx));
    (void)ok;
    return *pos->second;
}

const rel::RelativeMaps& MasseyEngine::maps_for(const CharacterModP& x) {
    auto deadline = std::chrono::steady_clock::now() +
                    std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                        std::chrono::duration<double>(opt_.entry_budget_seconds));
    return *ctx_for(x, deadline).R;
}

const nf::ClassGroupNF& MasseyEngine::class_group_for(const CharacterModP& x) {
    auto deadline = std::chrono::steady_clock::now() +
                    std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                        std::chrono::duration<double>(opt_.entry_budget_seconds));
    return ctx_for(x, deadline).cg;
}

mpz_class MasseyEngine::massey_xxy(const CharacterModP& x, const CharacterModP& y,
                                   const MuPClass& m, std::uint64_t seed,
                                   MasseyCertificate* cert) {
    auto start = std::chrono::steady_clock::now();
    auto deadline = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                std::chrono::duration<double>(opt_.entry_budget_seconds));
    auto check = [&](const char* phase) {
        if (std::chrono::steady_clock::now() > deadline)
            throw BudgetExceeded(std::string("massey: budget exhausted after ") + phase);
    };

    bool x_zero = std::all_of(x.values_on_generators.begin(), x.values_on_generators.end(),
                              [&](const mpz_class& v) -> bool { return v % p_ == 0; });
    if (x_zero) throw std::invalid_argument("massey_xxy: x must be a nonzero character");

    CharCtx& ctx = ctx_for(x, deadline);
    check("class group of L_x");

    DualCocycle dc = lift_dual_cocycle(*ctx.R, ctx.cg, G_, m, seed);
    check("dual cocycle lift");

    rel::IdealDecomposition dec = rel::decompose_ideal(*ctx.R, ctx.cg, G_, dc.I);
    check("ideal decomposition");

    QuadIdeal arg = ctx.R->norm_ideal(dec.Ip);
    if (p_ == 3) arg = ideal_mul(m.J, arg);
    mpz_class value = y.eval(G_, arg);

    if (cert) {
        cert->p = p_;
        cert->D = D_;
        cert->x = x;
        cert->y = y;
        cert->argument = m;
        cert->value = value;
        cert->a = dc.a;
        cert->b = dc.b;
        cert->I = dc.I;
        cert->u = dec.u;
        cert->Jp = dec.Jp;
        cert->Ip = dec.Ip;
        cert->choice_seed = seed;
    }
    return value;
}

unsigned fp_rank2x2(const std::array<std::array<mpz_class, 2>, 2>& m, const mpz_class& p) {
    exact::IntMatrix A(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) A(i, j) = m[i][j];
    std::vector<std::size_t> pivots;
    exact::fp_rref(A, p, &pivots);
    return static_cast<unsigned>(pivots.size());
}

ZassenhausMatrix zassenhaus_matrix(const mpz_class& D, const mpz_class& p,
                                   const std::vector<unram::ExtensionProviderRecord>& provider,
                                   const EngineOptions& opt) {
    MasseyEngine eng(D, p, provider, opt);
    return zassenhaus_matrix(eng);
}

ZassenhausMatrix zassenhaus_matrix(MasseyEngine& eng) {
    const mpz_class& p = eng.p();
    const ClassGroupQF& G = eng.class_group();
    if (G.p_rank(p) != 2)
        throw std::invalid_argument("zassenhaus_matrix: p-rank of Cl(K) must be 2");
    std::vector<CharacterModP> chars = quad::character_basis(G, p);
    std::vector<MuPClass> mus = quad::mu_p_basis(G, p);
    const CharacterModP& x = chars[0];
    const CharacterModP& y = chars[1];

    ZassenhausMatrix Z;
    Z.p = p;
    Z.D = eng.D();
    for (int i = 0; i < 2; ++i) {
        Z.entries[i][0] = eng.massey_xxy(x, y, mus[i], 1, &Z.certificates[i][0]);
        Z.entries[i][1] = eng.massey_xxy(y, x, mus[i], 1, &Z.certificates[i][1]);
    }
    Z.rank = fp_rank2x2(Z.entries, p);
    return Z;
}

}  // namespace cft::engine
