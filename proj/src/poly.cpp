#include "cftower/exact/poly.hpp"

#include "cftower/exact/int_matrix.hpp"

#include <stdexcept>

namespace cft::exact {

QPoly qpoly_trim(QPoly f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
    return f;
}

int qpoly_deg(const QPoly& f) { return static_cast<int>(f.size()) - 1; }

QPoly qpoly_add(const QPoly& f, const QPoly& g) {
    QPoly r(std::max(f.size(), g.size()), mpq_class(0));
    for (std::size_t i = 0; i < f.size(); ++i) r[i] += f[i];
    for (std::size_t i = 0; i < g.size(); ++i) r[i] += g[i];
    return qpoly_trim(std::move(r));
}

QPoly qpoly_sub(const QPoly& f, const QPoly& g) {
    QPoly r(std::max(f.size(), g.size()), mpq_class(0));
    for (std::size_t i = 0; i < f.size(); ++i) r[i] += f[i];
    for (std::size_t i = 0; i < g.size(); ++i) r[i] -= g[i];
    return qpoly_trim(std::move(r));
}

QPoly qpoly_mul(const QPoly& f, const QPoly& g) {
    if (f.empty() || g.empty()) return {};
    QPoly r(f.size() + g.size() - 1, mpq_class(0));
    for (std::size_t i = 0; i < f.size(); ++i)
        for (std::size_t j = 0; j < g.size(); ++j) r[i + j] += f[i] * g[j];
    return qpoly_trim(std::move(r));
}

QPoly qpoly_scale(const QPoly& f, const mpq_class& c) {
    if (c == 0) return {};
    QPoly r(f);
    for (auto& x : r) x *= c;
    return r;
}

void qpoly_divrem(const QPoly& f, const QPoly& g, QPoly& q, QPoly& r) {
    if (g.empty()) throw std::invalid_argument("qpoly_divrem: division by zero");
    r = f;
    q.assign(f.size() >= g.size() ? f.size() - g.size() + 1 : 0, mpq_class(0));
    while (r.size() >= g.size() && !r.empty()) {
        mpq_class c = r.back() / g.back();
        std::size_t shift = r.size() - g.size();
        q[shift] = c;
        for (std::size_t i = 0; i < g.size(); ++i) r[shift + i] -= c * g[i];
        r = qpoly_trim(std::move(r));
        if (r.size() > shift + g.size() - 1) throw std::logic_error("divrem: no progress");
    }
    q = qpoly_trim(std::move(q));
}

QPoly qpoly_gcd(QPoly f, QPoly g) {
    f = qpoly_trim(std::move(f));
    g = qpoly_trim(std::move(g));
    while (!g.empty()) {
        QPoly q, r;
        qpoly_divrem(f, g, q, r);
        f = std::move(g);
        g = std::move(r);
    }
    if (!f.empty()) {
        mpq_class lc = f.back();
        for (auto& x : f) x /= lc;
    }
    return f;
}

QPoly qpoly_derivative(const QPoly& f) {
    if (f.size() <= 1) return {};
    QPoly r(f.size() - 1);
    for (std::size_t i = 1; i < f.size(); ++i) r[i - 1] = f[i] * mpq_class(static_cast<long>(i));
    return qpoly_trim(std::move(r));
}

mpq_class qpoly_eval(const QPoly& f, const mpq_class& x) {
    mpq_class v = 0;
    for (std::size_t i = f.size(); i-- > 0;) v = v * x + f[i];
    return v;
}

namespace {

int sgn_q(const mpq_class& x) { return sgn(x); }

std::size_t sign_variations_at(const std::vector<QPoly>& chain, const mpq_class& x) {
    std::size_t var = 0;
    int last = 0;
    for (const auto& f : chain) {
        int s = sgn_q(qpoly_eval(f, x));
        if (s == 0) continue;
        if (last != 0 && s != last) ++var;
        last = s;
    }
    return var;
}

}  // namespace

std::size_t count_roots_open_unit_interval(const QPoly& fin) {
    QPoly f = qpoly_trim(fin);
    if (f.empty()) throw std::invalid_argument("root count of the zero polynomial");
    // Make squarefree, and strip roots at the endpoints so the open interval
    // count is exactly V(0) - V(1).
    QPoly g = qpoly_gcd(f, qpoly_derivative(f));
    if (qpoly_deg(g) > 0) {
        QPoly q, r;
        qpoly_divrem(f, g, q, r);
        f = q;
    }
    auto strip_root = [&](const mpq_class& a) {
        while (!f.empty() && qpoly_eval(f, a) == 0) {
            QPoly lin{-a, mpq_class(1)}, q, r;
            qpoly_divrem(f, lin, q, r);
            f = q;
        }
    };
    strip_root(0);
    strip_root(1);
    if (qpoly_deg(f) <= 0) return 0;

    std::vector<QPoly> chain{f, qpoly_derivative(f)};
    while (qpoly_deg(chain.back()) > 0) {
        QPoly q, r;
        qpoly_divrem(chain[chain.size() - 2], chain.back(), q, r);
        if (r.empty()) break;
        chain.push_back(qpoly_scale(r, mpq_class(-1)));
    }
    return sign_variations_at(chain, 0) - sign_variations_at(chain, 1);
}

int zpoly_deg(const ZPoly& f) { return static_cast<int>(f.size()) - 1; }

ZPoly zpoly_trim(ZPoly f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
    return f;
}

ZPoly zpoly_add(const ZPoly& f, const ZPoly& g) {
    ZPoly r(std::max(f.size(), g.size()), mpz_class(0));
    for (std::size_t i = 0; i < f.size(); ++i) r[i] += f[i];
    for (std::size_t i = 0; i < g.size(); ++i) r[i] += g[i];
    return zpoly_trim(std::move(r));
}

ZPoly zpoly_sub(const ZPoly& f, const ZPoly& g) {
    ZPoly r(std::max(f.size(), g.size()), mpz_class(0));
    for (std::size_t i = 0; i < f.size(); ++i) r[i] += f[i];
    for (std::size_t i = 0; i < g.size(); ++i) r[i] -= g[i];
    return zpoly_trim(std::move(r));
}

ZPoly zpoly_mul(const ZPoly& f, const ZPoly& g) {
    if (f.empty() || g.empty()) return {};
    ZPoly r(f.size() + g.size() - 1, mpz_class(0));
    for (std::size_t i = 0; i < f.size(); ++i)
        for (std::size_t j = 0; j < g.size(); ++j) r[i + j] += f[i] * g[j];
    return zpoly_trim(std::move(r));
}

ZPoly zpoly_derivative(const ZPoly& f) {
    if (f.size() <= 1) return {};
    ZPoly r(f.size() - 1);
    for (std::size_t i = 1; i < f.size(); ++i) r[i - 1] = f[i] * static_cast<long>(i);
    return zpoly_trim(std::move(r));
}

mpz_class zpoly_eval(const ZPoly& f, const mpz_class& x) {
    mpz_class v = 0;
    for (std::size_t i = f.size(); i-- > 0;) v = v * x + f[i];
    return v;
}

QPoly zpoly_to_q(const ZPoly& f) {
    QPoly r(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) r[i] = mpq_class(f[i]);
    return r;
}

mpz_class zpoly_resultant(const ZPoly& fin, const ZPoly& gin) {
    ZPoly f = zpoly_trim(fin), g = zpoly_trim(gin);
    int m = zpoly_deg(f), n = zpoly_deg(g);
    if (m < 0 || n < 0) return 0;
    if (m == 0) {
        mpz_class r;
        mpz_pow_ui(r.get_mpz_t(), f[0].get_mpz_t(), n);
        return r;
    }
    if (n == 0) {
        mpz_class r;
        mpz_pow_ui(r.get_mpz_t(), g[0].get_mpz_t(), m);
        return r;
    }
    IntMatrix syl(m + n, m + n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= m; ++j) syl(i, i + j) = f[m - j];
    for (int i = 0; i < m; ++i)
        for (int j = 0; j <= n; ++j) syl(n + i, i + j) = g[n - j];
    return syl.det();
}

mpz_class zpoly_discriminant(const ZPoly& fin) {
    ZPoly f = zpoly_trim(fin);
    int n = zpoly_deg(f);
    if (n < 1) throw std::invalid_argument("discriminant: degree < 1");
    mpz_class res = zpoly_resultant(f, zpoly_derivative(f));
    mpz_class d;
    mpz_divexact(d.get_mpz_t(), res.get_mpz_t(), f.back().get_mpz_t());
    if ((static_cast<long>(n) * (n - 1) / 2) % 2 == 1) d = -d;
    return d;
}

// ----------------------------------------------------------------- F_p side

FpPoly fp_trim(FpPoly f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
    return f;
}

FpPoly fp_reduce(const ZPoly& f, const FpPolyCtx& c) {
    FpPoly r(f.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        mpz_fdiv_r(r[i].get_mpz_t(), f[i].get_mpz_t(), c.p.get_mpz_t());
    return fp_trim(std::move(r));
}

FpPoly fp_mul(const FpPoly& f, const FpPoly& g, const FpPolyCtx& c) {
    if (f.empty() || g.empty()) return {};
    FpPoly r(f.size() + g.size() - 1, mpz_class(0));
    for (std::size_t i = 0; i < f.size(); ++i)
        for (std::size_t j = 0; j < g.size(); ++j) r[i + j] += f[i] * g[j];
    for (auto& x : r) mpz_fdiv_r(x.get_mpz_t(), x.get_mpz_t(), c.p.get_mpz_t());
    return fp_trim(std::move(r));
}

FpPoly fp_rem(FpPoly f, const FpPoly& g, const FpPolyCtx& c) {
    if (g.empty()) throw std::invalid_argument("fp_rem: division by zero");
    mpz_class lcinv;
    mpz_invert(lcinv.get_mpz_t(), g.back().get_mpz_t(), c.p.get_mpz_t());
    f = fp_trim(std::move(f));
    while (f.size() >= g.size()) {
        mpz_class q = (f.back() * lcinv) % c.p;
        std::size_t shift = f.size() - g.size();
        for (std::size_t i = 0; i < g.size(); ++i) {
            f[shift + i] -= q * g[i];
            mpz_fdiv_r(f[shift + i].get_mpz_t(), f[shift + i].get_mpz_t(), c.p.get_mpz_t());
        }
        f = fp_trim(std::move(f));
    }
    return f;
}

FpPoly fp_monic(FpPoly f, const FpPolyCtx& c) {
    f = fp_trim(std::move(f));
    if (f.empty()) return f;
    mpz_class inv;
    mpz_invert(inv.get_mpz_t(), f.back().get_mpz_t(), c.p.get_mpz_t());
    for (auto& x : f) x = (x * inv) % c.p;
    return f;
}

FpPoly fp_gcd(FpPoly f, FpPoly g, const FpPolyCtx& c) {
    f = fp_trim(std::move(f));
    g = fp_trim(std::move(g));
    while (!g.empty()) {
        FpPoly r = fp_rem(f, g, c);
        f = std::move(g);
        g = std::move(r);
    }
    return fp_monic(std::move(f), c);
}

FpPoly fp_powmod(const FpPoly& base, mpz_class e, const FpPoly& mod, const FpPolyCtx& c) {
    FpPoly result{mpz_class(1)};
    FpPoly b = fp_rem(base, mod, c);
    while (e > 0) {
        if (mpz_odd_p(e.get_mpz_t())) result = fp_rem(fp_mul(result, b, c), mod, c);
        b = fp_rem(fp_mul(b, b, c), mod, c);
        e >>= 1;
    }
    return result;
}

namespace {

// Cantor-Zassenhaus equal-degree splitting of a monic squarefree f whose
// irreducible factors all have degree d.
void edf(const FpPoly& f, unsigned d, const FpPolyCtx& c, std::vector<FpPoly>& out,
         gmp_randstate_t rng) {
    unsigned n = static_cast<unsigned>(f.size() - 1);
    if (n == d) {
        out.push_back(f);
        return;
    }
    mpz_class qd;
    mpz_pow_ui(qd.get_mpz_t(), c.p.get_mpz_t(), d);
    mpz_class e = (qd - 1) / 2;
    while (true) {
        FpPoly a(n);
        for (auto& x : a) mpz_urandomm(x.get_mpz_t(), rng, c.p.get_mpz_t());
        a = fp_trim(std::move(a));
        if (a.size() <= 1) continue;
        FpPoly b;
        if (c.p == 2) {
            // Characteristic 2: split with the trace map a + a^2 + ... + a^{2^{d-1}}.
            b = a;
            FpPoly pw = a;
            for (unsigned i = 1; i < d; ++i) {
                pw = fp_rem(fp_mul(pw, pw, c), f, c);
                if (b.size() < pw.size()) b.resize(pw.size(), mpz_class(0));
                for (std::size_t k = 0; k < pw.size(); ++k) b[k] = (b[k] + pw[k]) % 2;
            }
            b = fp_trim(std::move(b));
            if (b.empty()) continue;
            b[0] = (b[0] + 1) % 2;  // shift so both fibers can appear in the gcd
        } else {
            b = fp_powmod(a, e, f, c);
            if (b.empty()) continue;
            b[0] = (b[0] + c.p - 1) % c.p;  // b - 1
        }
        FpPoly g = fp_gcd(fp_trim(b), f, c);
        if (g.size() > 1 && g.size() < f.size()) {
            FpPoly q;  // f / g
            {
                // exact division via repeated fp_rem-style elimination
                FpPoly rem = f;
                q.assign(f.size() - g.size() + 1, mpz_class(0));
                mpz_class lcinv;
                mpz_invert(lcinv.get_mpz_t(), g.back().get_mpz_t(), c.p.get_mpz_t());
                while (rem.size() >= g.size()) {
                    mpz_class co = (rem.back() * lcinv) % c.p;
                    std::size_t shift = rem.size() - g.size();
                    q[shift] = co;
                    for (std::size_t i = 0; i < g.size(); ++i) {
                        rem[shift + i] -= co * g[i];
                        mpz_fdiv_r(rem[shift + i].get_mpz_t(), rem[shift + i].get_mpz_t(),
                                   c.p.get_mpz_t());
                    }
                    rem = fp_trim(std::move(rem));
                }
                q = fp_trim(std::move(q));
            }
            edf(g, d, c, out, rng);
            edf(q, d, c, out, rng);
            return;
        }
    }
}

FpPoly fp_divexact(const FpPoly& f, const FpPoly& g, const FpPolyCtx& c) {
    FpPoly rem = f, q(f.size() - g.size() + 1, mpz_class(0));
    mpz_class lcinv;
    mpz_invert(lcinv.get_mpz_t(), g.back().get_mpz_t(), c.p.get_mpz_t());
    while (rem.size() >= g.size()) {
        mpz_class co = (rem.back() * lcinv) % c.p;
        std::size_t shift = rem.size() - g.size();
        q[shift] = co;
        for (std::size_t i = 0; i < g.size(); ++i) {
            rem[shift + i] -= co * g[i];
            mpz_fdiv_r(rem[shift + i].get_mpz_t(), rem[shift + i].get_mpz_t(), c.p.get_mpz_t());
        }
        rem = fp_trim(std::move(rem));
    }
    if (!rem.empty()) throw std::logic_error("fp_divexact: not divisible");
    return fp_trim(std::move(q));
}

FpPoly fp_derivative(const FpPoly& f, const FpPolyCtx& c) {
    if (f.size() <= 1) return {};
    FpPoly r(f.size() - 1);
    for (std::size_t i = 1; i < f.size(); ++i) r[i - 1] = (f[i] * static_cast<long>(i)) % c.p;
    return fp_trim(std::move(r));
}

}  // namespace

std::vector<std::pair<FpPoly, unsigned>> fp_factor(const FpPoly& fin, const FpPolyCtx& c) {
    std::vector<std::pair<FpPoly, unsigned>> out;
    FpPoly f = fp_monic(fin, c);
    if (f.size() <= 1) return out;

    gmp_randstate_t rng;
    gmp_randinit_default(rng);
    gmp_randseed_ui(rng, 0x5eedu);

    // Squarefree decomposition, valid in characteristic p: emits (g, mult)
    // with g squarefree.
    struct Item {
        FpPoly f;
        unsigned mult;
    };
    std::vector<Item> work;
    {
        std::vector<Item> stack{{f, 1}};
        while (!stack.empty()) {
            Item it = stack.back();
            stack.pop_back();
            if (it.f.size() <= 1) continue;
            FpPoly d = fp_derivative(it.f, c);
            if (d.empty()) {
                // f(x) = g(x)^p = g0(x^p) by Frobenius.
                unsigned long pl = mpz_get_ui(c.p.get_mpz_t());
                FpPoly g((it.f.size() - 1) / pl + 1);
                for (std::size_t i = 0; i < g.size(); ++i) g[i] = it.f[i * pl];
                stack.push_back({fp_trim(std::move(g)), it.mult * static_cast<unsigned>(pl)});
                continue;
            }
            FpPoly co = fp_gcd(it.f, d, c);
            FpPoly w = fp_divexact(it.f, co, c);  // factors with p-coprime multiplicity
            unsigned k = 1;
            while (w.size() > 1) {
                FpPoly y = fp_gcd(w, co, c);      // those with multiplicity > k
                FpPoly z = fp_divexact(w, y, c);  // exact multiplicity k
                if (z.size() > 1) work.push_back({fp_monic(std::move(z), c), it.mult * k});
                co = fp_divexact(co, y, c);
                w = std::move(y);
                ++k;
            }
            if (co.size() > 1) stack.push_back({co, it.mult});  // p | multiplicity part
        }
    }

    for (const auto& it : work) {
        // Distinct-degree then equal-degree factorization of squarefree it.f.
        FpPoly rem = it.f;
        FpPoly x{mpz_class(0), mpz_class(1)};
        FpPoly h = x;
        unsigned d = 0;
        while (rem.size() > 1) {
            ++d;
            if (2 * d > rem.size() - 1) {
                out.emplace_back(fp_monic(rem, c), it.mult);
                break;
            }
            h = fp_powmod(h, c.p, rem, c);
            FpPoly hx = h;
            if (hx.size() < 2) hx.resize(2, mpz_class(0));
            hx[1] = (hx[1] + c.p - 1) % c.p;  // h - x
            FpPoly g = fp_gcd(fp_trim(hx), rem, c);
            if (g.size() > 1) {
                std::vector<FpPoly> eq;
                edf(g, d, c, eq, rng);
                for (auto& e : eq) out.emplace_back(std::move(e), it.mult);
                rem = fp_divexact(rem, g, c);
                h = fp_rem(h, rem, c);
            }
        }
    }
    gmp_randclear(rng);
    return out;
}

std::vector<mpz_class> fp_roots(const FpPoly& f, const FpPolyCtx& c) {
    std::vector<mpz_class> roots;
    for (const auto& [g, m] : fp_factor(f, c))
        if (g.size() == 2) roots.push_back(((c.p - g[0]) % c.p));
    return roots;
}

}  // namespace cft::exact
