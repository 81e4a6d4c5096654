#include "cftower/nf/ideal.hpp"

namespace cft::nf {

namespace {

mpz_class content_with(const IntMatrix& m, const mpz_class& extra) {
    mpz_class g = extra;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) g = gcd(g, m(i, j));
    return g;
}

IntMatrix scale(const IntMatrix& m, const mpz_class& c) {
    IntMatrix r = m;
    for (std::size_t i = 0; i < r.rows(); ++i)
        for (std::size_t j = 0; j < r.cols(); ++j) r(i, j) *= c;
    return r;
}

}  // namespace

FracIdeal fi_canon(FracIdeal I) {
    mpz_class g = content_with(I.num, I.den);
    if (g > 1) {
        I.den /= g;
        for (std::size_t i = 0; i < I.num.rows(); ++i)
            for (std::size_t j = 0; j < I.num.cols(); ++j) I.num(i, j) /= g;
    }
    return I;
}

FracIdeal fi_unit(const NumberFieldOrder& O) {
    return FracIdeal{IntMatrix::identity(O.degree()), 1};
}

FracIdeal fi_from_elem(const NumberFieldOrder& O, const NfElem& x) {
    if (O.is_zero(x)) throw std::invalid_argument("fi_from_elem: zero element");
    IntMatrix M = O.mul_matrix(x);
    return fi_canon(FracIdeal{exact::hnf_mod(M, abs(M.det())), x.den});
}

FracIdeal fi_from_gens(const NumberFieldOrder& O, const std::vector<NfElem>& gens) {
    std::size_t n = O.degree();
    mpz_class L = 1;
    for (const auto& g : gens) L = lcm(L, g.den);
    IntMatrix rows(n * gens.size(), n);
    for (std::size_t t = 0; t < gens.size(); ++t) {
        NfElem g = O.mul_int(gens[t], L);
        if (g.den != 1) throw std::logic_error("fi_from_gens: denominator not cleared");
        IntMatrix M = O.mul_matrix(g);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) rows(t * n + i, j) = M(i, j);
    }
    IntMatrix H = exact::hnf(rows);
    if (H.rows() != n) throw std::invalid_argument("fi_from_gens: generators do not span");
    return fi_canon(FracIdeal{H, L});
}

FracIdeal fi_mul(const NumberFieldOrder& O, const FracIdeal& A, const FracIdeal& B) {
    std::size_t n = O.degree();
    IntMatrix prod(n * n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            NfElem a{std::vector<mpz_class>(n), 1}, b{std::vector<mpz_class>(n), 1};
            for (std::size_t k = 0; k < n; ++k) {
                a.num[k] = A.num(i, k);
                b.num[k] = B.num(j, k);
            }
            NfElem c = O.mul(a, b);
            if (c.den != 1) throw std::logic_error("fi_mul: non-integral numerator product");
            for (std::size_t k = 0; k < n; ++k) prod(i * n + j, k) = c.num[k];
        }
    mpz_class d = abs(A.num.det()) * abs(B.num.det());
    return fi_canon(FracIdeal{exact::hnf_mod(prod, d), A.den * B.den});
}

FracIdeal fi_mul_elem(const NumberFieldOrder& O, const FracIdeal& A, const NfElem& x) {
    return fi_mul(O, A, fi_from_elem(O, x));
}

FracIdeal fi_inv(const NumberFieldOrder& O, const FracIdeal& A) {
    std::size_t n = O.degree();
    // (num/den)^{-1} = den * (O : num);  e * (O : num) lies in O for e = det.
    mpz_class e = abs(A.num.det());
    if (e == 0) throw std::invalid_argument("fi_inv: singular ideal");
    // y in (O : num)  <=>  y * g in O for each basis row g of num.  Writing
    // y = w/e (valid since e = N(num) lies in num), this is w * M_g = 0 mod e.
    IntMatrix C(n, 0);
    for (std::size_t g = 0; g < n; ++g) {
        NfElem gv{std::vector<mpz_class>(n), 1};
        for (std::size_t k = 0; k < n; ++k) gv.num[k] = A.num(g, k);
        C = C.hstack(O.mul_matrix(gv));
    }
    IntMatrix W = exact::hnf(exact::mod_preimage_lattice(C, e));
    if (W.rows() != n) throw std::logic_error("fi_inv: colon ideal not full rank");
    FracIdeal inv = fi_canon(FracIdeal{scale(W, A.den), e});
    FracIdeal check = fi_mul(O, FracIdeal{A.num, A.den}, inv);
    if (!fi_eq(check, fi_unit(O))) throw std::logic_error("fi_inv: ideal not invertible");
    return inv;
}

FracIdeal fi_pow(const NumberFieldOrder& O, FracIdeal A, mpz_class e) {
    if (e < 0) {
        A = fi_inv(O, A);
        e = -e;
    }
    FracIdeal R = fi_unit(O);
    while (e > 0) {
        if (mpz_odd_p(e.get_mpz_t())) R = fi_mul(O, R, A);
        A = fi_mul(O, A, A);
        e >>= 1;
    }
    return R;
}

FracIdeal fi_add(const NumberFieldOrder& O, const FracIdeal& A, const FracIdeal& B) {
    std::size_t n = O.degree();
    IntMatrix a = scale(A.num, B.den), b = scale(B.num, A.den);
    mpz_class d = abs(a.det());
    return fi_canon(FracIdeal{exact::hnf_mod(a.vstack(b), d), A.den * B.den});
}

mpq_class fi_norm(const NumberFieldOrder& O, const FracIdeal& A) {
    mpz_class dn = 1;
    for (std::size_t i = 0; i < O.degree(); ++i) dn *= A.den;
    mpq_class r(abs(A.num.det()), dn);
    r.canonicalize();
    return r;
}

bool fi_is_integral(const FracIdeal& A) { return A.den == 1; }

bool fi_eq(const FracIdeal& A, const FracIdeal& B) {
    return A.den == B.den && exact::hnf(A.num) == exact::hnf(B.num);
}

bool fi_contains(const FracIdeal& A, const FracIdeal& B) {
    IntMatrix H = exact::hnf(scale(A.num, B.den));
    for (std::size_t i = 0; i < B.num.rows(); ++i) {
        std::vector<mpz_class> v(B.num.cols());
        for (std::size_t j = 0; j < B.num.cols(); ++j) v[j] = B.num(i, j) * A.den;
        if (!exact::in_row_lattice(H, v)) return false;
    }
    return true;
}

bool fi_contains_elem(const NumberFieldOrder& O, const FracIdeal& A, const NfElem& x) {
    std::vector<mpz_class> v(O.degree());
    for (std::size_t j = 0; j < O.degree(); ++j) v[j] = x.num[j] * A.den;
    return exact::in_row_lattice(exact::hnf(scale(A.num, x.den)), v);
}

std::vector<NfElem> fi_basis_elems(const NumberFieldOrder& O, const FracIdeal& A) {
    std::vector<NfElem> out;
    for (std::size_t i = 0; i < A.num.rows(); ++i) {
        NfElem e{std::vector<mpz_class>(O.degree()), A.den};
        for (std::size_t j = 0; j < O.degree(); ++j) e.num[j] = A.num(i, j);
        mpz_class g = e.den;
        for (const auto& c : e.num) g = gcd(g, c);
        if (g > 1) {
            e.den /= g;
            for (auto& c : e.num) c /= g;
        }
        out.push_back(std::move(e));
    }
    return out;
}

long fi_valuation(const NumberFieldOrder& O, const FracIdeal& P, const FracIdeal& A) {
    if (!fi_is_integral(P)) throw std::invalid_argument("fi_valuation: P must be integral");
    FracIdeal Pinv = fi_inv(O, P);
    auto val_integral = [&](FracIdeal X) {
        long v = 0;
        while (true) {
            FracIdeal Y = fi_mul(O, X, Pinv);
            if (!fi_is_integral(Y)) break;
            X = std::move(Y);
            ++v;
        }
        return v;
    };
    FracIdeal numer{A.num, 1};
    long v = val_integral(fi_canon(numer));
    if (A.den != 1) {
        NfElem d = O.from_int(A.den);
        v -= val_integral(fi_from_elem(O, d));
    }
    return v;
}

}  // namespace cft::nf
