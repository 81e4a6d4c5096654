#include "cftower/nf/lll.hpp"

#include <algorithm>
#include <map>
#include <mutex>

namespace cft::nf {

namespace {

struct CF {
    mpf_class re, im;
    CF(long prec) : re(0, prec), im(0, prec) {}
};

CF cf_mul(const CF& a, const CF& b, long prec) {
    CF r(prec);
    r.re = a.re * b.re - a.im * b.im;
    r.im = a.re * b.im + a.im * b.re;
    return r;
}

CF cf_sub(const CF& a, const CF& b, long prec) {
    CF r(prec);
    r.re = a.re - b.re;
    r.im = a.im - b.im;
    return r;
}

CF cf_div(const CF& a, const CF& b, long prec) {
    CF r(prec);
    mpf_class d = b.re * b.re + b.im * b.im;
    r.re = (a.re * b.re + a.im * b.im) / d;
    r.im = (a.im * b.re - a.re * b.im) / d;
    return r;
}

mpf_class cf_abs2(const CF& a) { return a.re * a.re + a.im * a.im; }

// All complex roots of a monic integer polynomial by Durand-Kerner.
std::vector<CF> complex_roots(const exact::ZPoly& f, long prec) {
    std::size_t n = static_cast<std::size_t>(exact::zpoly_deg(f));
    std::vector<mpf_class> coef(n + 1);
    for (std::size_t i = 0; i <= n; ++i) coef[i] = mpf_class(f[i], prec);
    auto eval = [&](const CF& z) {
        CF acc(prec);
        acc.re = coef[n];
        for (std::size_t i = n; i-- > 0;) {
            acc = cf_mul(acc, z, prec);
            acc.re += coef[i];
        }
        return acc;
    };
    mpf_class bound(1, prec);
    for (std::size_t i = 0; i < n; ++i) bound = std::max(bound, mpf_class(abs(coef[i])));
    bound += 1;
    std::vector<CF> z(n, CF(prec));
    {
        CF seed(prec), cur(prec);
        seed.re = mpf_class("0.4", prec);
        seed.im = mpf_class("0.9", prec);
        cur.re = 1;
        for (std::size_t i = 0; i < n; ++i) {
            cur = cf_mul(cur, seed, prec);
            z[i].re = cur.re * bound;
            z[i].im = cur.im * bound;
        }
    }
    mpf_class eps(1, prec);
    eps >>= static_cast<unsigned long>(prec - 8);
    for (int iter = 0; iter < 500; ++iter) {
        mpf_class worst(0, prec);
        for (std::size_t i = 0; i < n; ++i) {
            CF num = eval(z[i]);
            CF den(prec);
            den.re = 1;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) den = cf_mul(den, cf_sub(z[i], z[j], prec), prec);
            CF delta = cf_div(num, den, prec);
            z[i] = cf_sub(z[i], delta, prec);
            mpf_class mag = cf_abs2(delta);
            if (mag > worst) worst = mag;
        }
        if (worst < eps * eps) break;
    }
    return z;
}

// Roots of the same defining polynomial are requested over and over (Gram
// matrices, Babai reductions); memoize per (polynomial, precision).
const std::vector<CF>& cached_complex_roots(const exact::ZPoly& f, long prec) {
    static std::mutex mu;
    static std::map<std::string, std::vector<CF>> cache;
    std::string key = std::to_string(prec);
    for (const auto& c : f) key += "," + c.get_str();
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, complex_roots(f, prec)).first;
    return it->second;
}

mpz_class mpq_round(const mpq_class& x) {
    mpz_class q, r;
    mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    if (2 * r >= x.get_den()) q += 1;
    return q;
}

}  // namespace

bool lll_gram(const IntMatrix& G, IntMatrix& U) {
    std::size_t n = G.rows();
    U = IntMatrix::identity(n);
    std::vector<std::vector<mpq_class>> mu(n, std::vector<mpq_class>(n, mpq_class(0)));
    std::vector<mpq_class> B(n, mpq_class(0));

    auto gram_entry = [&](std::size_t i, std::size_t j) -> mpq_class {
        mpz_class s = 0;
        for (std::size_t a = 0; a < n; ++a) {
            if (U(i, a) == 0) continue;
            for (std::size_t b = 0; b < n; ++b)
                if (U(j, b) != 0) s += U(i, a) * U(j, b) * G(a, b);
        }
        return mpq_class(s);
    };
    auto gso = [&]() -> bool {
        for (std::size_t i = 0; i < n; ++i) {
            mpq_class b = gram_entry(i, i);
            for (std::size_t j = 0; j < i; ++j) {
                mpq_class m = gram_entry(i, j);
                for (std::size_t k = 0; k < j; ++k) m -= mu[i][k] * mu[j][k] * B[k];
                if (B[j] == 0) return false;
                mu[i][j] = m / B[j];
                b -= mu[i][j] * mu[i][j] * B[j];
            }
            if (b <= 0) return false;
            B[i] = b;
        }
        return true;
    };

    if (!gso()) return false;
    std::size_t k = 1;
    int guard = 0;
    while (k < n) {
        if (++guard > 100000) throw std::logic_error("lll_gram: iteration cap exceeded");
        // Size-reduce row k.
        for (std::size_t j = k; j-- > 0;) {
            mpz_class q = mpq_round(mu[k][j]);
            if (q != 0) {
                for (std::size_t a = 0; a < n; ++a) U(k, a) -= q * U(j, a);
                if (!gso()) return false;
            }
        }
        mpq_class lhs = B[k];
        mpq_class rhs = (mpq_class(3, 4) - mu[k][k - 1] * mu[k][k - 1]) * B[k - 1];
        if (lhs >= rhs) {
            ++k;
        } else {
            for (std::size_t a = 0; a < n; ++a) std::swap(U(k, a), U(k - 1, a));
            if (!gso()) return false;
            if (k > 1) --k;
        }
    }
    return true;
}

IntMatrix t2_gram(const NumberFieldOrder& O, const IntMatrix& M, const mpz_class& den,
                  long prec_bits, long scale_bits) {
    std::size_t n = O.degree();
    const auto& roots = cached_complex_roots(O.defining_polynomial(), prec_bits);
    // Embeddings of the integral basis: emb_b[i][r].
    mpf_class fden(O.basis_den(), prec_bits);
    std::vector<std::vector<CF>> emb_b(n, std::vector<CF>(n, CF(prec_bits)));
    for (std::size_t r = 0; r < n; ++r) {
        CF pw(prec_bits);
        pw.re = 1;
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t i = 0; i < n; ++i) {
                mpf_class c(O.basis_num()(i, j), prec_bits);
                emb_b[i][r].re += c * pw.re / fden;
                emb_b[i][r].im += c * pw.im / fden;
            }
            pw = cf_mul(pw, roots[r], prec_bits);
        }
    }
    // Embeddings of the rows of M/den.
    mpf_class rden(den, prec_bits);
    std::vector<std::vector<CF>> emb(M.rows(), std::vector<CF>(n, CF(prec_bits)));
    for (std::size_t i = 0; i < M.rows(); ++i)
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t j = 0; j < n; ++j) {
                if (M(i, j) == 0) continue;
                mpf_class c(M(i, j), prec_bits);
                emb[i][r].re += c * emb_b[j][r].re / rden;
                emb[i][r].im += c * emb_b[j][r].im / rden;
            }
    IntMatrix Gm(M.rows(), M.rows());
    mpf_class scale(1, prec_bits);
    scale <<= static_cast<unsigned long>(scale_bits);
    for (std::size_t i = 0; i < M.rows(); ++i)
        for (std::size_t j = i; j < M.rows(); ++j) {
            mpf_class g(0, prec_bits);
            for (std::size_t r = 0; r < n; ++r)
                g += emb[i][r].re * emb[j][r].re + emb[i][r].im * emb[j][r].im;
            g *= scale;
            mpf_class rounded = floor(g + mpf_class("0.5", prec_bits));
            mpz_class v;
            mpz_set_f(v.get_mpz_t(), rounded.get_mpf_t());
            Gm(i, j) = v;
            Gm(j, i) = v;
        }
    return Gm;
}

std::vector<NfElem> short_ideal_elements(const NumberFieldOrder& O, const FracIdeal& I,
                                         long prec_bits) {
    std::size_t n = O.degree();
    for (int attempt = 0; attempt < 5; ++attempt, prec_bits *= 2) {
        IntMatrix G = t2_gram(O, I.num, I.den, prec_bits, prec_bits / 2);
        IntMatrix U;
        if (!lll_gram(G, U)) continue;
        std::vector<NfElem> out;
        for (std::size_t i = 0; i < n; ++i) {
            NfElem e{std::vector<mpz_class>(n), I.den};
            bool zero = true;
            for (std::size_t j = 0; j < n; ++j) {
                for (std::size_t a = 0; a < n; ++a) e.num[j] += U(i, a) * I.num(a, j);
                if (e.num[j] != 0) zero = false;
            }
            if (zero) continue;
            mpz_class g = e.den;
            for (const auto& c : e.num) g = gcd(g, c);
            if (g > 1) {
                e.den /= g;
                for (auto& c : e.num) c /= g;
            }
            out.push_back(std::move(e));
        }
        if (!out.empty()) return out;
    }
    throw PrecisionRetry("short_ideal_elements: precision cap reached");
}

}  // namespace cft::nf
