#include "cftower/nf/class_group.hpp"

#include <cmath>
#include <random>

namespace cft::nf {

namespace {

// Factor the integral ideal J over the factor base; returns false if J is
// not base-smooth.  J must be integral.
// Valuation of the integral ideal J at the base prime pr (cached inverse).
long prime_valuation(const NumberFieldOrder& O, const PrimeIdealNF& pr, FracIdeal J) {
    long v = 0;
    while (true) {
        FracIdeal Y = fi_mul(O, J, pr.Pinv);
        if (!fi_is_integral(Y)) break;
        J = std::move(Y);
        ++v;
    }
    return v;
}

bool factor_over_base(const ClassGroupNF& cg, const FracIdeal& J,
                      std::vector<mpz_class>& v) {
    const NumberFieldOrder& O = *cg.O;
    v.assign(cg.factor_base.size(), mpz_class(0));
    mpq_class nq = fi_norm(O, J);
    if (nq.get_den() != 1) return false;
    mpz_class m = nq.get_num();
    if (m == 1) return true;
    for (std::size_t i = 0; i < cg.factor_base.size() && m > 1; ++i) {
        const auto& pr = cg.factor_base[i];
        if (m % pr.q != 0) continue;
        long val = prime_valuation(O, pr, J);
        if (val == 0) continue;
        v[i] = val;
        mpz_class nf_p;
        mpz_pow_ui(nf_p.get_mpz_t(), pr.q.get_mpz_t(), pr.f * static_cast<unsigned long>(val));
        if (m % nf_p != 0) return false;
        m /= nf_p;
    }
    return m == 1;
}

// Try to write I * prod P^extra ~ principal: find alpha in I with
// (alpha) = I * J, J base-smooth; on success v = exponents of J.
bool smooth_attempt(const ClassGroupNF& cg, const FracIdeal& I,
                    std::vector<mpz_class>& v, NfElem& alpha) {
    const NumberFieldOrder& O = *cg.O;
    FracIdeal Iinv = fi_inv(O, I);
    std::vector<NfElem> cands;
    try {
        cands = short_ideal_elements(O, I);
    } catch (const PrecisionRetry&) {
        return false;
    }
    std::size_t tried = 0;
    for (const auto& a : cands) {
        if (++tried > 4) break;
        FracIdeal J = fi_mul(O, fi_from_elem(O, a), Iinv);
        if (!fi_is_integral(J)) continue;
        if (factor_over_base(cg, J, v)) {
            alpha = a;
            return true;
        }
    }
    return false;
}

bool solve_against_hnf(const IntMatrix& H, const std::vector<mpz_class>& v,
                       std::vector<mpz_class>& x) {
    std::size_t B = H.rows();
    if (H.cols() != B || v.size() != B) throw std::invalid_argument("solve_against_hnf: shape");
    std::vector<mpz_class> rem = v;
    x.assign(B, mpz_class(0));
    for (std::size_t j = 0; j < B; ++j) {
        if (rem[j] % H(j, j) != 0) return false;
        x[j] = rem[j] / H(j, j);
        if (x[j] != 0)
            for (std::size_t k = j; k < B; ++k) rem[k] -= x[j] * H(j, k);
    }
    for (std::size_t k = 0; k < B; ++k)
        if (rem[k] != 0) return false;
    return true;
}

NfElem power_product(const NumberFieldOrder& O, const std::vector<NfElem>& gens,
                     const std::vector<mpz_class>& exps) {
    NfElem num = O.one(), den = O.one();
    for (std::size_t i = 0; i < gens.size(); ++i) {
        if (exps[i] == 0) continue;
        if (exps[i] > 0)
            num = O.mul(num, O.pow(gens[i], exps[i]));
        else
            den = O.mul(den, O.pow(gens[i], -exps[i]));
    }
    return O.mul(num, O.inverse(den));
}

}  // namespace

mpz_class grh_factor_base_bound(const mpz_class& disc) {
    double l = std::log(std::abs(disc.get_d()));
    return mpz_class(static_cast<long>(12.0 * l * l) + 1);
}

mpz_class minkowski_bound(const NumberFieldOrder& O) {
    // (n!/n^n) (4/pi)^{r2} sqrt|disc|, with r2 overestimated by n/2 so the
    // bound is always a valid upper bound without computing signatures.
    std::size_t n = O.degree();
    double c = 1.0;
    for (std::size_t i = 1; i <= n; ++i) c *= static_cast<double>(i) / n;
    c *= std::pow(4.0 / 3.14159265358979, static_cast<double>(n) / 2.0);
    double b = c * std::sqrt(std::abs(O.discriminant().get_d()));
    return mpz_class(static_cast<long>(b) + 1);
}

ClassGroupNF class_group_nf(const NumberFieldOrder& O, const BoundPolicy& policy) {
    ClassGroupNF cg;
    cg.O = &O;
    cg.grh_assumed = policy.grh_assumed;
    cg.full_bound = policy.grh_assumed ? grh_factor_base_bound(O.discriminant())
                                       : minkowski_bound(O);

    mpz_class base_bound;
    if (policy.base_bound > 0) {
        base_bound = policy.base_bound;
    } else {
        double l = std::log(std::abs(O.discriminant().get_d()));
        base_bound = mpz_class(static_cast<long>(20.0 * l) + 30);
    }
    if (base_bound > cg.full_bound) base_bound = cg.full_bound;

    mpz_class q = 1;
    while (true) {
        mpz_nextprime(q.get_mpz_t(), q.get_mpz_t());
        if (q > base_bound) break;
        for (auto& s : factor_prime(O, q)) {
            mpz_class nrm;
            mpz_pow_ui(nrm.get_mpz_t(), q.get_mpz_t(), s.f);
            if (nrm <= base_bound) {
                FracIdeal P{s.hnf, 1};
                FracIdeal Pinv = fi_inv(O, P);
                cg.factor_base.push_back(PrimeIdealNF{q, s.e, s.f, std::move(P), std::move(Pinv)});
            }
        }
    }
    std::size_t B = cg.factor_base.size();
    if (B == 0) {
        cg.rel_hnf = IntMatrix(0, 0);
        cg.h = 1;
        cg.generation_certified = true;
        cg.snf = exact::smith_normal_form(cg.rel_hnf);
        return cg;
    }

    std::mt19937_64 rng(policy.seed * 0x9e3779b97f4a7c15ULL + 0xd1b54a32d192ed03ULL);
    long max_attempts = policy.max_attempts > 0
                            ? policy.max_attempts
                            : static_cast<long>(200 * B + 400);

    auto add_relation = [&](const std::vector<mpz_class>& row, const NfElem& gen) {
        cg.rel_rows.push_back(row);
        cg.rel_gens.push_back(gen);
    };

    // Phase 1: one relation touching each base prime.
    for (std::size_t i = 0; i < B && max_attempts > 0; ++i) {
        bool got = false;
        for (int t = 0; t < 12 && !got; ++t, --max_attempts) {
            FracIdeal I = cg.factor_base[i].P;
            std::vector<mpz_class> extra(B, mpz_class(0));
            extra[i] = 1;
            if (t > 0) {
                std::size_t j = rng() % B;
                I = fi_mul(O, I, cg.factor_base[j].P);
                extra[j] += 1;
            }
            std::vector<mpz_class> v;
            NfElem a;
            if (smooth_attempt(cg, I, v, a)) {
                for (std::size_t k = 0; k < B; ++k) v[k] += extra[k];
                add_relation(v, a);
                got = true;
            }
        }
    }

    // Phase 2: random relations until the relation determinant stabilizes.
    mpz_class last_h = -1;
    int stable = 0;
    while (max_attempts > 0) {
        std::size_t batch = std::max<std::size_t>(4, B / 8);
        for (std::size_t t = 0; t < batch && max_attempts > 0; ++t, --max_attempts) {
            std::size_t k = 1 + rng() % 3;
            FracIdeal I = fi_unit(O);
            std::vector<mpz_class> extra(B, mpz_class(0));
            for (std::size_t s = 0; s < k; ++s) {
                std::size_t j = rng() % B;
                I = fi_mul(O, I, cg.factor_base[j].P);
                extra[j] += 1;
            }
            std::vector<mpz_class> v;
            NfElem a;
            if (smooth_attempt(cg, I, v, a)) {
                for (std::size_t kk = 0; kk < B; ++kk) v[kk] += extra[kk];
                add_relation(v, a);
            }
        }
        if (cg.rel_rows.empty()) continue;
        IntMatrix R(cg.rel_rows.size(), B);
        for (std::size_t i = 0; i < cg.rel_rows.size(); ++i)
            for (std::size_t j = 0; j < B; ++j) R(i, j) = cg.rel_rows[i][j];
        IntMatrix H = exact::hnf(R);
        if (H.rows() == B) {
            mpz_class h = 1;
            for (std::size_t i = 0; i < B; ++i) h *= H(i, i);
            if (h == last_h) {
                if (++stable >= 3) {
                    cg.rel_hnf = H;
                    break;
                }
            } else {
                last_h = h;
                stable = 0;
            }
        }
    }
    if (cg.rel_hnf.rows() != B)
        throw RelationSearchExhausted("class_group_nf: relation lattice did not stabilize");

    auto refresh = [&]() {
        IntMatrix R(cg.rel_rows.size(), B);
        for (std::size_t i = 0; i < cg.rel_rows.size(); ++i)
            for (std::size_t j = 0; j < B; ++j) R(i, j) = cg.rel_rows[i][j];
        cg.rel_hnf = exact::hnf(R);
        cg.h = 1;
        for (std::size_t i = 0; i < B; ++i) cg.h *= cg.rel_hnf(i, i);
        cg.snf = exact::smith_normal_form(cg.rel_hnf);
        cg.invariants.clear();
        for (std::size_t i = 0; i < B; ++i)
            if (cg.snf.S(i, i) != 1) cg.invariants.push_back(cg.snf.S(i, i));
    };
    refresh();

    // Saturation: the stabilized determinant can be a proper multiple of h.
    // For every invariant d and prime l | d, hunt for relations in the class
    // of (d/l) * generator; keep going while the lattice grows.
    auto in_lattice = [&](const std::vector<mpz_class>& r) {
        std::vector<mpz_class> x;
        return solve_against_hnf(cg.rel_hnf, r, x);
    };
    bool grew = true;
    int rounds = 0;
    while (grew && ++rounds <= 12) {
        grew = false;
        IntMatrix Vinv = exact::inverse_unimodular(cg.snf.V);
        for (std::size_t i = 0; i < B && !grew; ++i) {
            mpz_class d = cg.snf.S(i, i);
            if (d <= 1) continue;
            mpz_class dd = d, l = 2;
            std::vector<mpz_class> ls;
            while (dd > 1) {
                if (dd % l == 0) {
                    ls.push_back(l);
                    while (dd % l == 0) dd /= l;
                }
                mpz_nextprime(l.get_mpz_t(), l.get_mpz_t());
            }
            for (const auto& ell : ls) {
                mpz_class mul = d / ell;
                FracIdeal I = fi_unit(O);
                std::vector<mpz_class> ypos(B, mpz_class(0));
                for (std::size_t j = 0; j < B; ++j) {
                    mpz_class yj = mul * Vinv(i, j);
                    if (yj > 0) {
                        ypos[j] = yj;
                        I = fi_mul(O, I, fi_pow(O, cg.factor_base[j].P, yj));
                    }
                }
                for (int t = 0; t < 40 && max_attempts > 0; ++t, --max_attempts) {
                    FracIdeal J = I;
                    std::vector<mpz_class> extra = ypos;
                    for (int s = 0; s <= t / 10; ++s) {
                        std::size_t jj = rng() % B;
                        J = fi_mul(O, J, cg.factor_base[jj].P);
                        extra[jj] += 1;
                    }
                    std::vector<mpz_class> v;
                    NfElem a;
                    if (!smooth_attempt(cg, J, v, a)) continue;
                    for (std::size_t kk = 0; kk < B; ++kk) v[kk] += extra[kk];
                    if (!in_lattice(v)) {
                        add_relation(v, a);
                        refresh();
                        grew = true;
                        break;
                    }
                }
                if (grew) break;
            }
        }
    }

    // Certification pass: every prime of norm <= full_bound must decompose
    // over the working base.
    if (policy.certify_generation) {
        bool ok = true;
        mpz_class qq = base_bound;
        while (ok) {
            mpz_nextprime(qq.get_mpz_t(), qq.get_mpz_t());
            if (qq > cg.full_bound) break;
            for (auto& s : factor_prime(O, qq)) {
                mpz_class nrm;
                mpz_pow_ui(nrm.get_mpz_t(), qq.get_mpz_t(), s.f);
                if (nrm > cg.full_bound) continue;
                FracIdeal P{s.hnf, 1};
                bool got = false;
                for (int t = 0; t < 12 && !got; ++t) {
                    FracIdeal I = P;
                    if (t > 0) I = fi_mul(O, I, cg.factor_base[rng() % B].P);
                    std::vector<mpz_class> v;
                    NfElem a;
                    if (smooth_attempt(cg, I, v, a)) got = true;
                }
                if (!got) {
                    ok = false;
                    break;
                }
            }
        }
        cg.generation_certified = ok;
    }
    return cg;
}

SmoothDecomposition smooth_decompose(const ClassGroupNF& cg, const FracIdeal& I,
                                     std::uint64_t seed) {
    const NumberFieldOrder& O = *cg.O;
    if (!fi_is_integral(I)) throw std::invalid_argument("smooth_decompose: integral ideal required");
    std::mt19937_64 rng(seed * 0x2545f4914f6cdd1dULL + 1);
    std::size_t B = cg.factor_base.size();
    for (int t = 0; t < 64; ++t) {
        FracIdeal J = I;
        std::vector<mpz_class> extra(B, mpz_class(0));
        for (int s = 0; s < t / 8; ++s) {
            std::size_t j = rng() % std::max<std::size_t>(B, 1);
            if (B == 0) break;
            J = fi_mul(O, J, cg.factor_base[j].P);
            extra[j] += 1;
        }
        std::vector<mpz_class> v;
        NfElem a;
        if (smooth_attempt(cg, J, v, a)) {
            SmoothDecomposition sd;
            sd.exponents.resize(B);
            for (std::size_t k = 0; k < B; ++k) sd.exponents[k] = v[k] + extra[k];
            sd.alpha = a;
            return sd;
        }
    }
    throw RelationSearchExhausted("smooth_decompose: no base-smooth reduction found");
}

PrincipalResult is_principal(const ClassGroupNF& cg, const FracIdeal& I) {
    const NumberFieldOrder& O = *cg.O;
    PrincipalResult res;
    FracIdeal num{I.num, 1};
    std::size_t B = cg.factor_base.size();

    std::vector<mpz_class> v(B, mpz_class(0));
    NfElem alpha = O.one();
    bool unit_num = fi_eq(num, fi_unit(O));
    if (!unit_num) {
        SmoothDecomposition sd = smooth_decompose(cg, num);
        v = sd.exponents;
        alpha = sd.alpha;
    }

    std::vector<mpz_class> x;
    bool member = B == 0 ? std::all_of(v.begin(), v.end(), [](const mpz_class& c) { return c == 0; })
                         : solve_against_hnf(cg.rel_hnf, v, x);
    if (!member) {
        res.principal = false;
        // Coordinates of [I] = -[prod P^v] in the invariant decomposition.
        std::vector<mpz_class> w(B, mpz_class(0));
        for (std::size_t i = 0; i < B; ++i)
            for (std::size_t j = 0; j < B; ++j) w[j] -= v[i] * cg.snf.V(i, j);
        for (std::size_t i = 0; i < B; ++i) {
            const mpz_class& d = cg.snf.S(i, i);
            if (d == 1) continue;
            mpz_class c = w[i] % d;
            if (c < 0) c += d;
            res.class_exponents.push_back(c);
        }
        return res;
    }

    // v = x * rel_hnf; express in terms of the raw relation rows via the HNF
    // transform, then divide out the corresponding generator product.
    NfElem g = O.one();
    if (!unit_num && B > 0) {
        IntMatrix R(cg.rel_rows.size(), B);
        for (std::size_t i = 0; i < cg.rel_rows.size(); ++i)
            for (std::size_t j = 0; j < B; ++j) R(i, j) = cg.rel_rows[i][j];
        IntMatrix U;
        IntMatrix H = exact::hnf_with_transform(R, U);
        std::vector<mpz_class> xh;
        if (!solve_against_hnf(H, v, xh)) throw std::logic_error("is_principal: transform mismatch");
        std::vector<mpz_class> c(cg.rel_rows.size(), mpz_class(0));
        for (std::size_t i = 0; i < B; ++i)
            for (std::size_t j = 0; j < cg.rel_rows.size(); ++j) c[j] += xh[i] * U(i, j);
        g = power_product(O, cg.rel_gens, c);
    }
    NfElem u = O.mul(alpha, O.inverse(g));
    u.den *= I.den;
    mpz_class gg = u.den;
    for (const auto& cc : u.num) gg = gcd(gg, cc);
    if (gg > 1) {
        u.den /= gg;
        for (auto& cc : u.num) cc /= gg;
    }
    if (!fi_eq(fi_from_elem(O, u), I)) throw std::logic_error("is_principal: generator failed verification");
    res.principal = true;
    res.generator = u;
    return res;
}

std::vector<mpz_class> class_coordinates(const ClassGroupNF& cg, const FracIdeal& I) {
    const NumberFieldOrder& O = *cg.O;
    std::size_t B = cg.factor_base.size();
    std::vector<mpz_class> v(B, mpz_class(0));
    FracIdeal num{I.num, 1};
    if (!fi_eq(num, fi_unit(O))) v = smooth_decompose(cg, num).exponents;
    std::vector<mpz_class> w(B, mpz_class(0));
    for (std::size_t i = 0; i < B; ++i)
        for (std::size_t j = 0; j < B; ++j) w[j] -= v[i] * cg.snf.V(i, j);
    std::vector<mpz_class> out;
    for (std::size_t i = 0; i < B; ++i) {
        const mpz_class& d = cg.snf.S(i, i);
        if (d == 1) continue;
        mpz_class c = w[i] % d;
        if (c < 0) c += d;
        out.push_back(c);
    }
    return out;
}

unsigned p_rank_nf(const ClassGroupNF& cg, const mpz_class& p) {
    unsigned r = 0;
    for (const auto& d : cg.invariants)
        if (d % p == 0) ++r;
    return r;
}

}  // namespace cft::nf
