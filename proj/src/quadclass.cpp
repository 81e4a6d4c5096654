#include "cftower/quad/quadclass.hpp"

#include <algorithm>
#include <functional>

namespace cft::quad {

using exact::IntMatrix;

bool is_fundamental_discriminant(const mpz_class& D) {
    if (D >= 0) return false;
    auto squarefree = [](mpz_class n) {
        if (n < 0) n = -n;
        if (n == 0) return false;
        for (mpz_class q = 2; q * q <= n; ++q) {
            if (n % (q * q) == 0) return false;
            while (n % q == 0) n /= q;
        }
        return true;
    };
    mpz_class r = ((D % 4) + 4) % 4;
    if (r == 1) return squarefree(D);
    if (r == 0) {
        mpz_class m = D / 4;
        mpz_class mr = ((m % 4) + 4) % 4;
        return (mr == 2 || mr == 3) && squarefree(m);
    }
    return false;
}

QuadForm principal_form(const mpz_class& D) {
    mpz_class r = ((D % 2) + 2) % 2;  // b parity must match D
    mpz_class b = r;                  // 0 or 1
    return {1, b, (b * b - D) / 4};
}

bool is_reduced(const QuadForm& f) {
    mpz_class ab = abs(f.b);
    if (!(ab <= f.a && f.a <= f.c)) return false;
    if ((ab == f.a || f.a == f.c) && f.b < 0) return false;
    return true;
}

QuadForm reduce(QuadForm f) {
    while (true) {
        // Normalize b into (-a, a].
        if (f.b > f.a || f.b <= -f.a) {
            // q = ceil((b - a) / 2a) brings b into (-a, a].
            mpz_class q;
            mpz_class num = f.b - f.a;
            mpz_class den = 2 * f.a;
            mpz_cdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
            mpz_class b2 = f.b - 2 * f.a * q;
            f.c = f.c - q * (f.b + b2) / 2;
            f.b = b2;
        }
        if (f.a > f.c) {
            f = {f.c, -f.b, f.a};
            continue;
        }
        break;
    }
    if (f.a == f.c && f.b < 0) f.b = -f.b;
    return f;
}

QuadForm form_inverse(const QuadForm& f) { return reduce({f.a, -f.b, f.c}); }

QuadElem qe_mul(const QuadElem& x, const QuadElem& y, const mpz_class& D) {
    // w^2 = D w - (D^2 - D)/4
    mpq_class nw = mpq_class((D * D - D) / 4);
    mpq_class u = x.u * y.u - x.v * y.v * nw;
    mpq_class v = x.u * y.v + x.v * y.u + x.v * y.v * mpq_class(D);
    u.canonicalize();
    v.canonicalize();
    return {u, v};
}

QuadElem qe_conj(const QuadElem& x, const mpz_class& D) {
    // sigma(w) = D - w
    return {x.u + x.v * mpq_class(D), -x.v};
}

mpq_class qe_norm(const QuadElem& x, const mpz_class& D) {
    QuadElem c = qe_conj(x, D);
    QuadElem n = qe_mul(x, c, D);
    if (n.v != 0) throw std::logic_error("qe_norm: nonrational norm");
    return n.u;
}

QuadElem qe_inverse(const QuadElem& x, const mpz_class& D) {
    mpq_class n = qe_norm(x, D);
    if (n == 0) throw std::invalid_argument("qe_inverse: zero element");
    QuadElem c = qe_conj(x, D);
    return {c.u / n, c.v / n};
}

namespace {

QuadIdeal canonicalize(const mpz_class& D, IntMatrix rows, mpz_class den) {
    if (den == 0) throw std::invalid_argument("ideal: zero denominator");
    if (den < 0) den = -den;
    IntMatrix H = hnf(rows);
    if (H.rows() != 2) throw std::invalid_argument("ideal: lattice not of full rank");
    mpz_class g = den;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), H(i, j).get_mpz_t());
    if (g > 1) {
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) H(i, j) /= g;
        den /= g;
    }
    return {D, H, den};
}

}  // namespace

QuadIdeal unit_ideal(const mpz_class& D) { return {D, IntMatrix::identity(2), 1}; }

QuadIdeal ideal_from_lattice(const mpz_class& D, const IntMatrix& rows, const mpz_class& den) {
    return canonicalize(D, rows, den);
}

QuadIdeal ideal_mul(const QuadIdeal& I, const QuadIdeal& J) {
    if (I.D != J.D) throw std::invalid_argument("ideal_mul: different fields");
    const mpz_class& D = I.D;
    IntMatrix rows(4, 2);
    std::size_t r = 0;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j, ++r) {
            QuadElem x{mpq_class(I.basis(i, 0)), mpq_class(I.basis(i, 1))};
            QuadElem y{mpq_class(J.basis(j, 0)), mpq_class(J.basis(j, 1))};
            QuadElem z = qe_mul(x, y, D);
            rows(r, 0) = z.u.get_num();  // denominators are 1 here
            rows(r, 1) = z.v.get_num();
        }
    return canonicalize(D, rows, I.den * J.den);
}

QuadIdeal ideal_conj(const QuadIdeal& I) {
    IntMatrix rows(2, 2);
    for (std::size_t i = 0; i < 2; ++i) {
        QuadElem c = qe_conj({mpq_class(I.basis(i, 0)), mpq_class(I.basis(i, 1))}, I.D);
        rows(i, 0) = c.u.get_num();
        rows(i, 1) = c.v.get_num();
    }
    return canonicalize(I.D, rows, I.den);
}

mpq_class ideal_norm(const QuadIdeal& I) {
    mpq_class n(abs(I.basis.det()), I.den * I.den);
    n.canonicalize();
    return n;
}

QuadIdeal ideal_inverse(const QuadIdeal& I) {
    // I sigma(I) = N(I) O
    QuadIdeal c = ideal_conj(I);
    mpq_class n = ideal_norm(I);
    // scale c by 1/n
    IntMatrix rows(c.basis);
    mpz_class num = n.get_num(), den = n.get_den();
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) rows(i, j) *= den;
    return canonicalize(I.D, rows, c.den * num);
}

QuadIdeal ideal_pow(const QuadIdeal& I, const mpz_class& e) {
    if (e < 0) return ideal_pow(ideal_inverse(I), -e);
    QuadIdeal acc = unit_ideal(I.D);
    QuadIdeal base = I;
    mpz_class k = e;
    while (k > 0) {
        if (mpz_odd_p(k.get_mpz_t())) acc = ideal_mul(acc, base);
        k >>= 1;
        if (k > 0) base = ideal_mul(base, base);
    }
    return acc;
}

QuadIdeal principal_ideal(const mpz_class& D, const QuadElem& x) {
    if (x.u == 0 && x.v == 0) throw std::invalid_argument("principal_ideal: zero");
    QuadElem xw = qe_mul(x, {mpq_class(0), mpq_class(1)}, D);
    mpz_class den = 1;
    mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), x.u.get_den().get_mpz_t());
    mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), x.v.get_den().get_mpz_t());
    mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), xw.u.get_den().get_mpz_t());
    mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), xw.v.get_den().get_mpz_t());
    IntMatrix rows(2, 2);
    auto as_int = [](mpq_class q) {
        q.canonicalize();
        if (q.get_den() != 1) throw std::logic_error("principal_ideal: clearing failed");
        return q.get_num();
    };
    rows(0, 0) = as_int(x.u * den);
    rows(0, 1) = as_int(x.v * den);
    rows(1, 0) = as_int(xw.u * den);
    rows(1, 1) = as_int(xw.v * den);
    return canonicalize(D, rows, den);
}

bool ideal_contains(const QuadIdeal& I, const QuadElem& x) {
    // x in (1/den) L  <=>  den*x in L
    mpq_class u = x.u * I.den, v = x.v * I.den;
    if (u.get_den() != 1 || v.get_den() != 1) return false;
    return exact::in_row_lattice(I.basis, {u.get_num(), v.get_num()});
}

std::optional<QuadElem> principal_generator(const QuadIdeal& I) {
    const mpz_class& D = I.D;
    // Lagrange-Gauss reduction of the basis under the norm form.
    QuadElem v1{mpq_class(I.basis(0, 0)), mpq_class(I.basis(0, 1))};
    QuadElem v2{mpq_class(I.basis(1, 0)), mpq_class(I.basis(1, 1))};
    auto B = [&](const QuadElem& x, const QuadElem& y) -> mpq_class {  // Tr(x sigma(y))/2
        QuadElem t = qe_mul(x, qe_conj(y, D), D);
        return mpq_class(t.u + t.v * mpq_class(D) / 2);
    };
    while (true) {
        if (qe_norm(v1, D) > qe_norm(v2, D)) std::swap(v1, v2);
        mpq_class mu = B(v2, v1) / qe_norm(v1, D);
        // round to nearest integer
        mpz_class m;
        mpq_class half(1, 2);
        mpq_class shifted = mu + half;
        mpz_fdiv_q(m.get_mpz_t(), shifted.get_num().get_mpz_t(), shifted.get_den().get_mpz_t());
        if (m == 0) break;
        v2 = {v2.u - m * v1.u, v2.v - m * v1.v};
    }
    QuadElem g{v1.u / I.den, v1.v / I.den};
    g.u.canonicalize();
    g.v.canonicalize();
    if (principal_ideal(D, g) == I) return g;
    return std::nullopt;
}

std::vector<QuadForm> enumerate_reduced_forms(const mpz_class& D) {
    if (D >= 0) throw std::invalid_argument("enumerate_reduced_forms: D must be negative");
    std::vector<QuadForm> out;
    mpz_class b = ((D % 2) + 2) % 2;  // parity of b equals parity of D
    for (; 3 * b * b <= -D; b += 2) {
        mpz_class M = (b * b - D) / 4;
        mpz_class amin = b > 1 ? b : mpz_class(1);
        for (mpz_class a = amin; a * a <= M; ++a) {
            if (M % a != 0) continue;
            mpz_class c = M / a;
            // reduced: |b| <= a <= c with b >= 0 if |b| == a or a == c
            out.push_back({a, b, c});
            if (b > 0 && b < a && a < c) out.push_back({a, -b, c});
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

QuadForm form_of_ideal(const QuadIdeal& I) {
    const mpz_class& D = I.D;
    QuadElem v1{mpq_class(I.basis(0, 0)), mpq_class(I.basis(0, 1))};
    QuadElem v2{mpq_class(I.basis(1, 0)), mpq_class(I.basis(1, 1))};
    mpz_class det = I.basis.det();
    if (det < 0) std::swap(v1, v2);  // orient the basis; the other order gives the inverse class
    mpq_class n = ideal_norm(I) * I.den * I.den;  // norm of the integral lattice part
    mpq_class A = qe_norm(v1, D) / n;
    QuadElem t = qe_mul(v1, qe_conj(v2, D), D);
    mpq_class Bc = (2 * t.u + t.v * mpq_class(D)) / n;  // Tr(v1 sigma(v2)) / n
    mpq_class C = qe_norm(v2, D) / n;
    A.canonicalize();
    Bc.canonicalize();
    C.canonicalize();
    if (A.get_den() != 1 || Bc.get_den() != 1 || C.get_den() != 1)
        throw std::logic_error("form_of_ideal: non-integral form (ideal not invertible?)");
    QuadForm f{A.get_num(), Bc.get_num(), C.get_num()};
    if (f.disc() != D) throw std::logic_error("form_of_ideal: discriminant mismatch");
    return reduce(f);
}

QuadIdeal ideal_of_form(const QuadForm& f) {
    mpz_class D = f.disc();
    IntMatrix rows(2, 2);
    rows(0, 0) = f.a;
    rows(0, 1) = 0;
    rows(1, 0) = (f.b - D) / 2;
    rows(1, 1) = 1;
    return canonicalize(D, rows, 1);
}

QuadForm compose(const QuadForm& f, const QuadForm& g) {
    if (f.disc() != g.disc()) throw std::invalid_argument("compose: discriminant mismatch");
    return form_of_ideal(ideal_mul(ideal_of_form(f), ideal_of_form(g)));
}

QuadForm form_pow(const QuadForm& f, const mpz_class& e) {
    if (e < 0) return form_pow(form_inverse(f), -e);
    QuadForm acc = principal_form(f.disc());
    QuadForm base = reduce(f);
    mpz_class k = e;
    while (k > 0) {
        if (mpz_odd_p(k.get_mpz_t())) acc = compose(acc, base);
        k >>= 1;
        if (k > 0) base = compose(base, base);
    }
    return acc;
}

ClassGroupQF::ClassGroupQF(const mpz_class& D) : D_(D) {
    if (!is_fundamental_discriminant(D))
        throw std::invalid_argument("ClassGroupQF: discriminant not fundamental");
    forms_ = enumerate_reduced_forms(D);
    h_ = static_cast<long>(forms_.size());

    // Incremental construction of the group with a relation matrix.
    std::vector<QuadForm> raw;
    std::map<QuadForm, std::vector<mpz_class>> raw_log;
    raw_log[principal_form(D)] = {};
    std::vector<std::vector<mpz_class>> relations;

    for (const auto& f : forms_) {
        if (raw_log.count(f)) continue;
        raw.push_back(f);
        std::size_t m = raw.size();
        for (auto& [k, v] : raw_log) v.resize(m, 0);
        for (auto& r : relations) r.resize(m, 0);
        // Relative order of f over the current subgroup.
        QuadForm pw = f;
        mpz_class k = 1;
        while (!raw_log.count(pw)) {
            pw = compose(pw, f);
            ++k;
        }
        std::vector<mpz_class> rel(m, 0);
        rel[m - 1] = k;
        const auto& hit = raw_log[pw];
        for (std::size_t i = 0; i < m; ++i) rel[i] -= hit[i];
        relations.push_back(rel);
        // Extend the table by the new cosets f^j * S.
        std::vector<std::pair<QuadForm, std::vector<mpz_class>>> snapshot(raw_log.begin(),
                                                                          raw_log.end());
        QuadForm fj = principal_form(D);
        for (mpz_class j = 1; j < k; ++j) {
            fj = compose(fj, f);
            for (const auto& [e, v] : snapshot) {
                QuadForm prod = compose(fj, e);
                auto vv = v;
                vv[m - 1] += j;
                raw_log.emplace(prod, std::move(vv));
            }
        }
    }
    if (raw_log.size() != forms_.size())
        throw std::logic_error("class group construction: subgroup size mismatch");

    std::size_t m = raw.size();
    if (m == 0) {
        dlog_[principal_form(D)] = {};
        return;
    }
    IntMatrix R(relations.size(), m);
    for (std::size_t i = 0; i < relations.size(); ++i)
        for (std::size_t j = 0; j < m; ++j) R(i, j) = relations[i][j];
    exact::SmithResult sr = exact::smith_normal_form(R);
    IntMatrix Vinv = exact::inverse_unimodular(sr.V);

    // Canonical generator for coordinate i is prod_j raw[j]^{Vinv(i,j)}.
    std::vector<QuadForm> cgens;
    std::vector<mpz_class> cinv;
    for (std::size_t i = 0; i < m; ++i) {
        mpz_class s = sr.S(i, i);
        if (s == 1) continue;
        if (s == 0) throw std::logic_error("class group: free part in finite group");
        QuadForm gi = principal_form(D);
        for (std::size_t j = 0; j < m; ++j) gi = compose(gi, form_pow(raw[j], Vinv(i, j)));
        cgens.push_back(gi);
        cinv.push_back(s);
    }
    gens_ = std::move(cgens);
    inv_ = std::move(cinv);

    // Full discrete-log table in canonical coordinates.
    std::vector<mpz_class> e(inv_.size(), 0);
    QuadForm cur = principal_form(D);
    // Iterate the direct product by odometer.
    std::vector<QuadForm> gen_pows(inv_.size(), principal_form(D));
    std::function<void(std::size_t, QuadForm)> rec = [&](std::size_t idx, QuadForm acc) {
        if (idx == inv_.size()) {
            dlog_[acc] = e;
            return;
        }
        QuadForm step = acc;
        for (mpz_class j = 0; j < inv_[idx]; ++j) {
            e[idx] = j;
            rec(idx + 1, step);
            step = compose(step, gens_[idx]);
        }
        e[idx] = 0;
    };
    rec(0, cur);
    if (dlog_.size() != forms_.size())
        throw std::logic_error("class group: canonical generators do not span");
}

std::vector<mpz_class> ClassGroupQF::class_log(const QuadForm& f) const {
    QuadForm r = reduce(f);
    if (r.disc() != D_) throw FormWrongDiscriminant();
    auto it = dlog_.find(r);
    if (it == dlog_.end()) throw std::logic_error("class_log: form not in table");
    return it->second;
}

std::vector<mpz_class> ClassGroupQF::class_log(const QuadIdeal& I) const {
    return class_log(form_of_ideal(I));
}

std::size_t ClassGroupQF::p_rank(const mpz_class& p) const {
    std::size_t r = 0;
    for (const auto& d : inv_)
        if (d % p == 0) ++r;
    return r;
}

mpz_class CharacterModP::eval(const ClassGroupQF& G, const QuadForm& f) const {
    auto e = G.class_log(f);
    mpz_class v = 0;
    for (std::size_t i = 0; i < e.size(); ++i) v += e[i] * values_on_generators[i];
    return ((v % p) + p) % p;
}

mpz_class CharacterModP::eval(const ClassGroupQF& G, const QuadIdeal& I) const {
    return eval(G, form_of_ideal(I));
}

std::vector<CharacterModP> character_basis(const ClassGroupQF& G, const mpz_class& p) {
    std::vector<CharacterModP> out;
    const auto& inv = G.invariant_factors();
    for (std::size_t i = 0; i < inv.size(); ++i) {
        if (inv[i] % p != 0) continue;
        CharacterModP x{p, std::vector<mpz_class>(inv.size(), 0)};
        // x(g_i) = value of the i-th coordinate mod p after projecting
        // Z/d_i ->> Z/p by e -> e * (d_i/p) ... the dual pairing uses the
        // canonical surjection: x(sum e_j g_j) = e_i mod p.
        x.values_on_generators[i] = 1;
        out.push_back(std::move(x));
    }
    return out;
}

std::vector<MuPClass> mu_p_basis(const ClassGroupQF& G, const mpz_class& p) {
    const mpz_class& D = G.discriminant();
    if (D == -3 || D == -4)
        throw std::invalid_argument("mu_p_basis: D in {-3,-4} excluded (extra units)");
    if (p < 3) throw std::invalid_argument("mu_p_basis: p must be odd");
    std::vector<MuPClass> out;
    const auto& inv = G.invariant_factors();
    for (std::size_t i = 0; i < inv.size(); ++i) {
        if (inv[i] % p != 0) continue;
        QuadForm jf = form_pow(G.generators()[i], inv[i] / p);  // order exactly p
        QuadIdeal J = ideal_of_form(jf);
        QuadIdeal Jp = ideal_pow(J, p);
        auto gen = principal_generator(Jp);
        if (!gen) throw std::logic_error("mu_p_basis: J^p not recognized as principal");
        QuadElem a_prime = qe_inverse(*gen, D);  // (a') = J^{-p}
        out.push_back({a_prime, J, jf});
    }
    if (out.empty()) throw NoPTorsion();
    return out;
}

}  // namespace cft::quad
