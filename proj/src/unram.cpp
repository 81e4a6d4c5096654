#include "cftower/unram/unram.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "cftower/exact/fp_matrix.hpp"
#include "cftower/nf/roots.hpp"

namespace cft::unram {

using exact::FpPolyCtx;
using exact::IntMatrix;
using exact::ZPoly;
using nf::FracIdeal;

namespace {

mpz_class pos_mod(const mpz_class& a, const mpz_class& m) {
    mpz_class r = a % m;
    if (r < 0) r += m;
    return r;
}

NfElem canon_elem(NfElem x) {
    mpz_class g = x.den;
    for (const auto& c : x.num) g = gcd(g, c);
    if (g > 1) {
        x.den /= g;
        for (auto& c : x.num) c /= g;
    }
    return x;
}

NfElem div_int(NfElem x, const mpz_class& d) {
    x.den *= abs(d);
    if (d < 0)
        for (auto& c : x.num) c = -c;
    return canon_elem(std::move(x));
}

IntMatrix mat_pow(const IntMatrix& A, unsigned e) {
    IntMatrix R = IntMatrix::identity(A.rows());
    for (unsigned i = 0; i < e; ++i) R = R * A;
    return R;
}

// Minimal polynomial of w = (D + sqrt(D))/2, so O_K = Z[w].
ZPoly w_min_poly(const mpz_class& D) { return {(D * D - D) / 4, -D, 1}; }

// Small-height quadratic generator omega0 = (delta + sqrt(D))/2 with
// delta = D mod 2; then w = omega0 + (D - delta)/2.
ZPoly omega0_min_poly(const mpz_class& D, mpz_class& shift) {
    mpz_class delta = pos_mod(D, 4) == 1 ? 1 : 0;
    shift = (D - delta) / 2;
    if (delta == 1) return {(1 - D) / 4, -1, 1};
    return {-D / 4, 0, 1};
}

// ---------- cubic field enumeration (p = 3 native path) ----------

// Does t^3 + q t + r have an integer root?  Exact piecewise-monotone
// bisection inside the Cauchy bound.
bool has_integer_root(const mpz_class& q, const mpz_class& r) {
    auto f = [&](const mpz_class& k) -> mpz_class { return k * k * k + q * k + r; };
    auto search = [&](mpz_class lo, mpz_class hi) {
        if (lo > hi) return false;
        mpz_class flo = f(lo), fhi = f(hi);
        if (flo == 0 || fhi == 0) return true;
        if ((flo < 0) == (fhi < 0)) return false;
        while (hi - lo > 1) {
            mpz_class mid = (lo + hi) / 2, fm = f(mid);
            if (fm == 0) return true;
            if ((fm < 0) == (flo < 0))
                lo = mid, flo = fm;
            else
                hi = mid;
        }
        return false;
    };
    mpz_class B = 1 + std::max(abs(q), abs(r));
    if (q >= 0) return search(-B, B);
    mpz_class a;
    mpz_class mq3 = (-q) / 3;
    mpz_sqrt(a.get_mpz_t(), mq3.get_mpz_t());
    return search(-B, -a - 1) || search(-a, a) || search(a + 1, B);
}

// Degree pattern of f modulo small primes not dividing `skip`; used as a
// cheap isomorphism signature (fields compare only at shared primes).
std::map<long, std::string> degree_patterns(const ZPoly& f, const mpz_class& skip) {
    std::map<long, std::string> out;
    for (long q = 2; q < 500; ++q) {
        if (mpz_probab_prime_p(mpz_class(q).get_mpz_t(), 25) == 0) continue;
        if (skip % q == 0) continue;
        FpPolyCtx c{q};
        auto fac = exact::fp_factor(exact::fp_reduce(f, c), c);
        std::string pat;
        std::vector<int> degs;
        for (const auto& [g, e] : fac)
            for (unsigned i = 0; i < e; ++i) degs.push_back(exact::zpoly_deg(g));
        std::sort(degs.begin(), degs.end());
        for (int d : degs) pat += static_cast<char>('0' + d);
        out[q] = pat;
    }
    return out;
}

bool patterns_agree(const std::map<long, std::string>& a, const std::map<long, std::string>& b) {
    for (const auto& [q, pat] : a) {
        auto it = b.find(q);
        if (it != b.end() && it->second != pat) return false;
    }
    return true;
}

// ---------- polynomials with coefficients in an order (field) ----------

using NfPoly = std::vector<NfElem>;

int nfp_deg(const NumberFieldOrder& O, const NfPoly& A) {
    for (std::size_t i = A.size(); i-- > 0;)
        if (!O.is_zero(A[i])) return static_cast<int>(i);
    return -1;
}

NfPoly nfp_rem(const NumberFieldOrder& O, NfPoly A, const NfPoly& B) {
    int db = nfp_deg(O, B);
    NfElem lead_inv = O.inverse(B[static_cast<std::size_t>(db)]);
    for (int da = nfp_deg(O, A); da >= db; da = nfp_deg(O, A)) {
        NfElem c = O.mul(A[static_cast<std::size_t>(da)], lead_inv);
        for (int j = 0; j <= db; ++j) {
            std::size_t k = static_cast<std::size_t>(da - db + j);
            A[k] = O.sub(A[k], O.mul(c, B[static_cast<std::size_t>(j)]));
        }
    }
    A.resize(static_cast<std::size_t>(db));
    return A;
}

NfPoly nfp_gcd(const NumberFieldOrder& O, NfPoly A, NfPoly B) {
    while (nfp_deg(O, B) >= 0) {
        NfPoly R = nfp_rem(O, A, B);
        A = std::move(B);
        B = std::move(R);
    }
    int d = nfp_deg(O, A);
    if (d < 0) return A;
    NfElem inv = O.inverse(A[static_cast<std::size_t>(d)]);
    for (auto& c : A) c = O.mul(c, inv);
    A.resize(static_cast<std::size_t>(d) + 1);
    return A;
}

// ---------- compositum L = F . K ----------

// Integer polynomial through the given values at x = 0, 1, ..., n (Newton
// divided differences; asserts integrality).
ZPoly interpolate_at_small_points(const std::vector<mpz_class>& ys) {
    std::size_t n = ys.size();
    std::vector<std::vector<mpq_class>> dd(n);
    dd[0].assign(ys.begin(), ys.end());
    for (std::size_t k = 1; k < n; ++k) {
        dd[k].resize(n - k);
        for (std::size_t i = 0; i + k < n; ++i)
            dd[k][i] = (dd[k - 1][i + 1] - dd[k - 1][i]) / mpq_class(k);
    }
    std::vector<mpq_class> poly{dd[0][0]}, basis{1};
    for (std::size_t k = 1; k < n; ++k) {
        // basis *= (x - (k-1))
        basis.insert(basis.begin(), 0);
        for (std::size_t j = 0; j + 1 < basis.size(); ++j)
            basis[j] -= mpq_class(k - 1) * basis[j + 1];
        if (poly.size() < basis.size()) poly.resize(basis.size(), mpq_class(0));
        for (std::size_t j = 0; j < basis.size(); ++j) poly[j] += dd[k][0] * basis[j];
    }
    ZPoly out(poly.size());
    for (std::size_t j = 0; j < poly.size(); ++j) {
        if (poly[j].get_den() != 1)
            throw std::logic_error("interpolate_at_small_points: non-integer coefficient");
        out[j] = poly[j].get_num();
    }
    return exact::zpoly_trim(out);
}

struct Compositum {
    NumberFieldOrder L;
    std::vector<mpq_class> theta_pc;   // theta (root of f) in the power basis of eta
    std::vector<mpq_class> omega0_pc;  // omega0 in the power basis of eta
    ZPoly g;                           // minimal polynomial of eta = c*theta + omega0
    long c = 1;
};

// Maximal order of the compositum of Q[t]/(f) (degree p, field discriminant
// supported on D's primes) and K = Q(sqrt(D)).  The tensor-product order
// O_F . O_K has index supported on the primes of D (its discriminant is
// disc(O_F)^2 D^p), so Round-2 runs only there and the enormous polynomial
// discriminant of the compositum polynomial is never factored.
Compositum build_compositum(const ZPoly& f, const mpz_class& D) {
    std::size_t p = static_cast<std::size_t>(exact::zpoly_deg(f));
    std::size_t n = 2 * p;
    mpz_class shift;
    ZPoly w0 = omega0_min_poly(D, shift);

    NumberFieldOrder OF = nf::maximal_order(f);

    for (long c = 1; c <= 24; ++c) {
        // f_c = minimal polynomial of c * theta.
        ZPoly fc(f.size());
        mpz_class pw = 1;
        for (std::size_t i = f.size(); i-- > 0;) {
            fc[i] = f[i] * pw;
            pw *= c;
        }
        // g(j) = Res_u(fc(u), w0(j - u)) interpolated at j = 0..2p.
        std::vector<mpz_class> vals(n + 1);
        for (std::size_t j = 0; j <= n; ++j) {
            mpz_class jj(static_cast<unsigned long>(j));
            ZPoly B{exact::zpoly_eval(w0, jj), -w0[1] - 2 * w0[2] * jj, w0[2]};
            vals[j] = exact::zpoly_resultant(fc, B);
        }
        ZPoly g = interpolate_at_small_points(vals);
        if (exact::zpoly_deg(g) != static_cast<int>(n)) continue;
        if (g[n] == -1)
            for (auto& cf : g) cf = -cf;
        if (g[n] != 1) throw std::logic_error("build_compositum: non-monic resultant");
        if (exact::zpoly_discriminant(g) == 0) continue;  // eta not primitive for this c

        // g squarefree and eta annihilated by it inside a degree-2p field, so
        // g is irreducible and Z[eta] is an order we can compute in.
        NumberFieldOrder O0(g, IntMatrix::identity(n), 1);
        NfElem eta = O0.theta();

        // theta_c = the root of fc lying in Q(eta): gcd(fc(u), w0(eta - u)).
        NfPoly A(fc.size()), B(3);
        for (std::size_t i = 0; i < fc.size(); ++i) A[i] = O0.from_int(fc[i]);
        B[0] = O0.add(O0.add(O0.from_int(w0[0]), O0.mul_int(eta, w0[1])), O0.mul(eta, eta));
        B[1] = O0.sub(O0.from_int(-w0[1]), O0.mul_int(eta, 2));
        B[2] = O0.one();
        NfPoly G = nfp_gcd(O0, A, B);
        if (nfp_deg(O0, G) != 1) throw std::logic_error("build_compositum: gcd degree != 1");
        NfElem theta = div_int(O0.neg(G[0]), c);
        NfElem omega0 = O0.sub(eta, O0.mul_int(theta, c));

        // Tensor-product basis {b_i(theta) * omega0^k}.
        std::vector<NfElem> rows;
        for (std::size_t i = 0; i < p; ++i) {
            NfElem bi = O0.zero();
            NfElem tp = O0.one();
            for (std::size_t j = 0; j < p; ++j) {
                bi = O0.add(bi, O0.mul_int(tp, OF.basis_num()(i, j)));
                tp = O0.mul(tp, theta);
            }
            bi = div_int(bi, OF.basis_den());
            rows.push_back(bi);
            rows.push_back(O0.mul(bi, omega0));
        }
        mpz_class den = 1;
        for (const auto& r : rows) den = den / gcd(den, r.den) * r.den;
        IntMatrix bn(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) bn(i, j) = rows[i].num[j] * (den / rows[i].den);
        NumberFieldOrder OT(g, bn, den);

        // Round-2 only at primes of disc(OT): D's primes plus anything a
        // provider-supplied subfield drags in.
        std::vector<mpz_class> support = nf::prime_factor_support(D);
        mpz_class rest = abs(OT.discriminant());
        for (const auto& q : support)
            while (rest % q == 0) rest /= q;
        if (rest > 1)
            for (const auto& q : nf::prime_factor_support(rest)) support.push_back(q);
        NumberFieldOrder OL = nf::maximalize_at(OT, support);

        std::vector<mpq_class> theta_pc(n), omega0_pc(n);
        for (std::size_t j = 0; j < n; ++j) {
            theta_pc[j] = mpq_class(theta.num[j], theta.den);
            omega0_pc[j] = mpq_class(omega0.num[j], omega0.den);
        }
        return Compositum{std::move(OL), std::move(theta_pc), std::move(omega0_pc), std::move(g),
                          c};
    }
    throw std::logic_error("build_compositum: no primitive element found");
}

// Matrix (row action) of the field automorphism eta -> eta_img on the
// integral basis; eta_img must be a root of the defining polynomial.
IntMatrix automorphism_matrix(const NumberFieldOrder& L, const NfElem& eta_img) {
    std::size_t n = L.degree();
    std::vector<NfElem> pw(n);
    pw[0] = L.one();
    for (std::size_t k = 1; k < n; ++k) pw[k] = L.mul(pw[k - 1], eta_img);
    IntMatrix S(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        NfElem acc = L.zero();
        for (std::size_t k = 0; k < n; ++k)
            acc = L.add(acc, L.mul_int(pw[k], L.basis_num()(j, k)));
        acc = div_int(acc, L.basis_den());
        if (acc.den != 1) throw std::logic_error("automorphism_matrix: non-integral image");
        for (std::size_t k = 0; k < n; ++k) S(j, k) = acc.num[k];
    }
    return S;
}

NfElem apply_matrix(const NfElem& z, const IntMatrix& S) {
    std::size_t n = S.rows();
    NfElem out;
    out.den = z.den;
    out.num.assign(n, 0);
    for (std::size_t j = 0; j < n; ++j) {
        if (z.num[j] == 0) continue;
        for (std::size_t k = 0; k < n; ++k) out.num[k] += z.num[j] * S(j, k);
    }
    return canon_elem(std::move(out));
}

// Frobenius exponent of a degree-1 prime q of K, relative to a given
// generator `sig` of Gal(L/K): the unique k with sig^k(gen) = gen^{N(q)}
// modulo a prime of L over q.
mpz_class frobenius_exponent(const NumberFieldOrder& L, const IntMatrix& sig, unsigned p,
                             const NfElem& gen, const NfElem& omega, const quad::QuadIdeal& q) {
    if (q.den != 1) throw std::invalid_argument("frobenius_exponent: integral prime required");
    mpq_class nq = quad::ideal_norm(q);
    if (nq.get_den() != 1) throw std::invalid_argument("frobenius_exponent: bad norm");
    mpz_class ell = nq.get_num();
    if (mpz_probab_prime_p(ell.get_mpz_t(), 25) == 0 || ell == 2)
        throw std::invalid_argument("frobenius_exponent: need a degree-1 prime over an odd prime");
    if (gen.den != 1) throw std::invalid_argument("frobenius_exponent: generator not integral");

    std::size_t n = L.degree();
    // The prime of L above q: both lattice generators of q must reduce into it.
    std::vector<NfElem> qgens;
    for (std::size_t i = 0; i < 2; ++i)
        qgens.push_back(
            L.add(L.from_int(q.basis(i, 0)), canon_elem(L.mul_int(omega, q.basis(i, 1)))));
    FracIdeal Q;
    bool found = false;
    for (const auto& slot : nf::factor_prime(L, ell)) {
        if (slot.e != 1) throw DegeneratePrime("prime ramified in L");
        FracIdeal cand{slot.hnf, 1};
        if (nf::fi_contains_elem(L, cand, qgens[0]) && nf::fi_contains_elem(L, cand, qgens[1])) {
            Q = cand;
            found = true;
            break;
        }
    }
    if (!found) throw std::logic_error("frobenius_exponent: no prime of L over q");

    IntMatrix Qm = exact::fp_reduce_mat(Q.num, ell);
    auto in_Q = [&](const NfElem& z) {
        std::vector<mpz_class> v(n), x;
        for (std::size_t j = 0; j < n; ++j) v[j] = pos_mod(z.num[j], ell);
        return exact::fp_solve_left(Qm, v, x, ell);
    };

    // gen^ell modulo ell.
    auto mul_mod = [&](const NfElem& a, const NfElem& b) {
        NfElem r = L.mul(a, b);
        for (auto& c : r.num) c = pos_mod(c, ell);
        r.den = 1;
        return r;
    };
    NfElem acc = L.one(), base = gen;
    for (auto& c : base.num) c = pos_mod(c, ell);
    mpz_class e = ell;
    while (e > 0) {
        if (mpz_odd_p(e.get_mpz_t())) acc = mul_mod(acc, base);
        base = mul_mod(base, base);
        e >>= 1;
    }

    std::vector<NfElem> imgs(p);
    imgs[0] = gen;
    for (unsigned k = 1; k < p; ++k) imgs[k] = apply_matrix(imgs[k - 1], sig);
    for (unsigned k1 = 0; k1 < p; ++k1)
        for (unsigned k2 = k1 + 1; k2 < p; ++k2)
            if (in_Q(L.sub(imgs[k1], imgs[k2])))
                throw DegeneratePrime("conjugates of the generator collide mod q");

    long hit = -1;
    for (unsigned k = 0; k < p; ++k)
        if (in_Q(L.sub(imgs[k], acc))) {
            if (hit >= 0) throw DegeneratePrime("ambiguous Frobenius match");
            hit = static_cast<long>(k);
        }
    if (hit < 0) throw DegeneratePrime("no Frobenius match");
    return mpz_class(hit);
}

// Degree-1 prime of K over a split odd rational prime ell (smallest root).
quad::QuadIdeal split_prime_above(const mpz_class& D, const mpz_class& ell, const mpz_class& root) {
    IntMatrix rows(2, 2);
    rows(0, 0) = ell;
    rows(1, 0) = -root;
    rows(1, 1) = 1;
    return quad::ideal_from_lattice(D, rows, 1);
}

}  // namespace

std::vector<ZPoly> cubic_fields_of_discriminant(const mpz_class& D) {
    if (D >= 0 || !quad::is_fundamental_discriminant(D))
        throw std::invalid_argument("cubic_fields_of_discriminant: D must be fundamental, < 0");
    mpz_class aD = -D;

    // Every cubic field of discriminant D has a trace-zero generator theta
    // with T2(theta) <= 2 sqrt|D| (Minkowski on the trace-zero plane, whose
    // covolume is at most sqrt(3|D|)), hence minimal polynomial t^3 + q t + r
    // with |q| <= sqrt|D| and index m <= sqrt(12) |D|^{1/4}.
    mpz_class Qb, Mb, r4;
    mpz_sqrt(Qb.get_mpz_t(), aD.get_mpz_t());
    Qb += 1;
    mpz_root(r4.get_mpz_t(), aD.get_mpz_t(), 4);
    Mb = 4 * (r4 + 1);

    struct Cand {
        ZPoly f;
        mpz_class m, q, r;  // f = t^3 + q t - r with r > 0
        std::map<long, std::string> pat;
    };
    std::vector<Cand> cands;
    for (mpz_class m = 1; m <= Mb; ++m) {
        mpz_class mm = m * m * aD;
        for (mpz_class q = -Qb; q <= Qb; ++q) {
            mpz_class s = mm - 4 * q * q * q;
            if (s <= 0 || s % 27 != 0) continue;
            mpz_class s27 = s / 27;
            if (mpz_perfect_square_p(s27.get_mpz_t()) == 0) continue;
            mpz_class r;
            mpz_sqrt(r.get_mpz_t(), s27.get_mpz_t());
            if (r == 0) continue;
            if (has_integer_root(q, -r)) continue;  // t^3 + q t - r reducible
            ZPoly f{-r, q, 0, 1};
            NumberFieldOrder O = nf::maximal_order(f);
            if (O.discriminant() != D) continue;  // index < m: different field disc
            auto pat = degree_patterns(f, m * m * aD);
            cands.push_back(Cand{std::move(f), m, q, r, std::move(pat)});
        }
    }

    // Group isomorphic fields by agreement of degree patterns at all shared
    // primes; iso fields always agree, and the count cross-check below makes
    // a false merge a loud failure.
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.m != b.m) return a.m < b.m;
        if (abs(a.q) != abs(b.q)) return abs(a.q) < abs(b.q);
        return a.r < b.r;
    });
    std::vector<Cand> reps;
    for (auto& c : cands) {
        bool merged = false;
        for (const auto& r : reps)
            if (patterns_agree(r.pat, c.pat)) {
                merged = true;
                break;
            }
        if (!merged) reps.push_back(std::move(c));
    }

    quad::ClassGroupQF G(D);
    std::size_t rank = G.p_rank(3);
    mpz_class three_r = 1;
    for (std::size_t i = 0; i < rank; ++i) three_r *= 3;
    mpz_class expected = (three_r - 1) / 2;
    if (mpz_class(static_cast<unsigned long>(reps.size())) != expected)
        throw std::logic_error("cubic_fields_of_discriminant: count " +
                               std::to_string(reps.size()) + " != (3^r-1)/2 = " +
                               expected.get_str() + " for D = " + D.get_str());

    std::vector<ZPoly> out;
    for (const auto& r : reps) out.push_back(r.f);
    std::sort(out.begin(), out.end(), [](const ZPoly& a, const ZPoly& b) {
        if (abs(a[1]) != abs(b[1])) return abs(a[1]) < abs(b[1]);
        if (a[1] != b[1]) return a[1] > b[1];
        return abs(a[0]) < abs(b[0]);
    });
    return out;
}

std::vector<ExtensionProviderRecord> parse_provider_text(const std::string& text) {
    std::vector<ExtensionProviderRecord> out;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::vector<std::string> toks;
        std::string t;
        while (ls >> t) toks.push_back(t);
        if (toks.empty() || toks[0][0] == '#') continue;
        if (toks.size() < 4) throw ProviderParseError(lineno, "expected `p D c_0 ... c_n`");
        ExtensionProviderRecord rec;
        try {
            rec.p = mpz_class(toks[0]);
            rec.D = mpz_class(toks[1]);
            for (std::size_t i = 2; i < toks.size(); ++i) rec.poly.emplace_back(toks[i]);
        } catch (const std::invalid_argument&) {
            throw ProviderParseError(lineno, "non-integer token");
        }
        if (rec.p < 3 || mpz_probab_prime_p(rec.p.get_mpz_t(), 25) == 0 || rec.p == 2)
            throw ProviderParseError(lineno, "p must be an odd prime");
        if (rec.D >= 0 || !quad::is_fundamental_discriminant(rec.D))
            throw ProviderParseError(lineno, "D must be a negative fundamental discriminant");
        rec.poly = exact::zpoly_trim(rec.poly);
        int deg = exact::zpoly_deg(rec.poly);
        if (deg < 1 || rec.poly[static_cast<std::size_t>(deg)] != 1)
            throw ProviderParseError(lineno, "polynomial must be monic");
        if (rec.p * 2 != deg && rec.p != deg)
            throw ProviderParseError(lineno, "degree must be p or 2p");
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<ExtensionProviderRecord> parse_provider_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("parse_provider_file: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_provider_text(ss.str());
}

NfElem UnramifiedExtension::apply_sigma(const NfElem& z, unsigned k) const {
    NfElem out = z;
    for (unsigned i = 0; i < k; ++i) out = apply_matrix(out, sigma);
    return out;
}

UnramifiedReport verify_unramified(const NumberFieldOrder& L, const mpz_class& D,
                                   const mpz_class& p) {
    UnramifiedReport rep;
    mpz_class e = 1;
    for (mpz_class i = 0; i < p; ++i) e *= abs(D);
    rep.disc_expected = e;
    rep.disc_found = abs(L.discriminant());
    rep.pass = rep.disc_found == rep.disc_expected;
    if (!rep.pass) {
        mpz_class found = rep.disc_found;
        std::vector<mpz_class> support;
        try {
            support = nf::prime_factor_support(D);
            mpz_class rest = found;
            for (const auto& q : support)
                while (rest % q == 0) rest /= q;
            if (rest > 1)
                for (const auto& q : nf::prime_factor_support(rest)) support.push_back(q);
        } catch (const std::runtime_error&) {
            // Unfactorable mismatch: report the D-primes only.
        }
        for (const auto& q : support) {
            unsigned long vf = 0, vd = 0;
            mpz_class t = found;
            while (t % q == 0) t /= q, ++vf;
            t = abs(D);
            while (t % q == 0) t /= q, ++vd;
            if (mpz_class(vf) != p * vd) rep.ramified_witnesses.push_back(q);
        }
    }
    return rep;
}

UnramifiedReport verify_unramified(const UnramifiedExtension& L) {
    return verify_unramified(L.L, L.D, L.p);
}

mpz_class frobenius_class(const UnramifiedExtension& L, const quad::QuadIdeal& q) {
    return frobenius_exponent(L.L, L.sigma, static_cast<unsigned>(L.p.get_ui()), L.gen, L.omega,
                              q);
}

UnramifiedExtension build_extension(const mpz_class& D, const mpz_class& p,
                                    const quad::CharacterModP& x, const quad::ClassGroupQF& G,
                                    const std::vector<ExtensionProviderRecord>& provider) {
    if (x.p != p) throw std::invalid_argument("build_extension: character modulus != p");
    if (G.discriminant() != D) throw std::invalid_argument("build_extension: class group mismatch");
    bool nontrivial = false;
    for (const auto& v : x.values_on_generators)
        if (pos_mod(v, p) != 0) nontrivial = true;
    if (!nontrivial) throw std::invalid_argument("build_extension: character is trivial");
    unsigned pu = static_cast<unsigned>(p.get_ui());

    struct Candidate {
        ZPoly f;
        bool absolute;
    };
    std::vector<Candidate> candidates;
    if (p == 3) {
        for (auto& f : cubic_fields_of_discriminant(D)) candidates.push_back({std::move(f), false});
    } else {
        for (const auto& rec : provider)
            if (rec.p == p && rec.D == D)
                candidates.push_back({rec.poly, exact::zpoly_deg(rec.poly) == 2 * p});
        if (candidates.empty())
            throw NoProviderData("no provider record for p = " + p.get_str() +
                                 ", D = " + D.get_str());
    }

    ZPoly wpoly = w_min_poly(D);
    mpz_class shift;
    omega0_min_poly(D, shift);

    for (const auto& cand : candidates) {
        // --- construct the field, omega, and the candidate sigma generators ---
        std::vector<std::pair<NumberFieldOrder, bool>> built;
        NfElem omega, gen;
        std::vector<IntMatrix> sig_gens;  // candidate generators of Gal(L/K)
        ZPoly subf;
        try {
            if (!cand.absolute) {
                Compositum comp = build_compositum(cand.f, D);
                NumberFieldOrder L = std::move(comp.L);
                if (!verify_unramified(L, D, p).pass) continue;
                NfElem theta = L.from_power_basis(comp.theta_pc);
                NfElem omega0 = L.from_power_basis(comp.omega0_pc);
                omega = canon_elem(L.add(omega0, L.from_int(shift)));
                std::vector<mpq_class> eta_pc(L.degree(), mpq_class(0));
                eta_pc[1] = 1;
                gen = L.from_power_basis(eta_pc);
                auto roots = nf::roots_in_field(L, cand.f, pu);
                for (const auto& z : roots) {
                    if (L.eq(z, theta)) continue;
                    NfElem eta_img = canon_elem(L.add(L.mul_int(z, comp.c), omega0));
                    sig_gens.push_back(automorphism_matrix(L, eta_img));
                    break;  // one non-identity generator suffices
                }
                subf = cand.f;
                built.emplace_back(std::move(L), true);
            } else {
                NumberFieldOrder L = nf::maximal_order(cand.f, nf::prime_factor_support(D));
                if (!verify_unramified(L, D, p).pass) continue;
                auto wroots = nf::roots_in_field(L, wpoly, 2);
                if (wroots.empty()) continue;
                omega = wroots[0];
                gen = L.theta();
                for (const auto& z : nf::roots_in_field(L, cand.f, 2 * pu)) {
                    if (L.eq(z, gen)) continue;
                    IntMatrix S = automorphism_matrix(L, z);
                    if (L.eq(apply_matrix(omega, S), omega)) {
                        sig_gens.push_back(std::move(S));
                        break;
                    }
                }
                subf = ZPoly{};
                built.emplace_back(std::move(L), true);
            }
        } catch (const nf::PrecisionRetry&) {
            continue;
        }
        if (sig_gens.empty() || built.empty()) continue;
        NumberFieldOrder& L = built[0].first;
        IntMatrix S = sig_gens[0];

        // sigma sanity: order exactly p, fixed sublattice = O_K (rank 2).
        IntMatrix Sp = mat_pow(S, pu);
        if (Sp != IntMatrix::identity(L.degree()) || S == IntMatrix::identity(L.degree()))
            throw std::logic_error("build_extension: sigma order != p");
        if (exact::left_kernel(S - IntMatrix::identity(L.degree())).rows() != 2)
            throw std::logic_error("build_extension: fixed sublattice rank != 2");

        // --- Artin kernel matching and pinning over split test primes ---
        bool consistent = true;
        bool have_scalar = false;
        mpz_class scalar = 0;
        bool have_q0 = false;
        quad::QuadIdeal q0 = quad::unit_ideal(D);
        unsigned tested = 0;
        for (mpz_class ell = 3; ell < 100000 && (tested < 20 || !have_q0); ell += 2) {
            if (mpz_probab_prime_p(ell.get_mpz_t(), 25) == 0) continue;
            if (D % ell == 0) continue;
            FpPolyCtx lc{ell};
            auto wr = exact::fp_roots(exact::fp_reduce(wpoly, lc), lc);
            if (wr.size() != 2) continue;  // need ell split in K
            quad::QuadIdeal q = split_prime_above(D, ell, wr[0] < wr[1] ? wr[0] : wr[1]);
            mpz_class v = pos_mod(x.eval(G, q), p);
            mpz_class k;
            try {
                k = frobenius_exponent(L, S, pu, gen, omega, q);
            } catch (const DegeneratePrime&) {
                continue;
            }
            if ((v == 0) != (k == 0)) {
                consistent = false;
                break;
            }
            if (v != 0) {
                mpz_class vinv;
                mpz_invert(vinv.get_mpz_t(), v.get_mpz_t(), p.get_mpz_t());
                mpz_class c = pos_mod(k * vinv, p);
                if (have_scalar && c != scalar) {
                    consistent = false;
                    break;
                }
                scalar = c;
                have_scalar = true;
                if (!have_q0 && v == 1) {
                    q0 = q;
                    have_q0 = true;
                }
            }
            ++tested;
        }
        if (!consistent || !have_scalar || !have_q0) continue;

        IntMatrix sigma_x = mat_pow(S, static_cast<unsigned>(scalar.get_ui()));
        UnramifiedExtension E{D,     p,   std::move(L), std::move(sigma_x), x,
                              omega, gen, subf,         q0};
        if (frobenius_class(E, q0) != 1)
            throw std::logic_error("build_extension: pinning verification failed");
        return E;
    }
    throw KernelMismatch("no candidate field realizes ker x for D = " + D.get_str() +
                         ", p = " + p.get_str());
}

}  // namespace cft::unram
