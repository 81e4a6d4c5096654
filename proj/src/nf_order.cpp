#include "cftower/nf/order.hpp"

#include <algorithm>
#include <cstdint>
#include <sstream>

#include "cftower/exact/fp_matrix.hpp"

namespace cft::nf {

using exact::FpPoly;
using exact::FpPolyCtx;
using exact::QPoly;

namespace {

// Inverse of a nonsingular integer matrix as num/den (den > 0).
void rat_inverse(const IntMatrix& B, IntMatrix& num, mpz_class& den) {
    std::size_t n = B.rows();
    IntMatrix Bt = B.transpose();
    std::vector<std::vector<mpq_class>> cols(n);
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<mpq_class> e(n, mpq_class(0));
        e[j] = 1;
        if (!exact::solve_left_rational(Bt, e, cols[j]))
            throw std::invalid_argument("rat_inverse: singular matrix");
    }
    den = 1;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i)
            den = lcm(den, cols[j][i].get_den());
    num = IntMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            mpq_class v = cols[j][i] * den;
            num(i, j) = v.get_num();
        }
}

mpz_class content_with(const IntMatrix& m, const mpz_class& extra) {
    mpz_class g = extra;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) g = gcd(g, m(i, j));
    return g;
}

// x^e mod q in the order, x given by integral basis coordinates.
std::vector<mpz_class> elem_pow_mod(const NumberFieldOrder& O, std::vector<mpz_class> x,
                                    mpz_class e, const mpz_class& q) {
    std::size_t n = O.degree();
    auto mulmod = [&](const std::vector<mpz_class>& u,
                      const std::vector<mpz_class>& v) -> std::vector<mpz_class> {
        std::vector<mpz_class> w(n, mpz_class(0));
        for (std::size_t i = 0; i < n; ++i) {
            if (u[i] == 0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                if (v[j] == 0) continue;
                mpz_class c = u[i] * v[j] % q;
                const IntMatrix& M = O.mult(i);
                for (std::size_t k = 0; k < n; ++k)
                    if (M(j, k) != 0) w[k] = (w[k] + c * M(j, k)) % q;
            }
        }
        for (auto& c : w)
            if (c < 0) c += q;
        return w;
    };
    NfElem one = O.one();
    std::vector<mpz_class> r(one.num);
    for (auto& c : r) {
        c %= q;
        if (c < 0) c += q;
    }
    for (auto& c : x) {
        c %= q;
        if (c < 0) c += q;
    }
    while (e > 0) {
        if (mpz_odd_p(e.get_mpz_t())) r = mulmod(r, x);
        x = mulmod(x, x);
        e >>= 1;
    }
    return r;
}

// Matrix of the Frobenius x -> x^q on O/qO (row j = e_j^q).
IntMatrix frobenius_matrix(const NumberFieldOrder& O, const mpz_class& q) {
    std::size_t n = O.degree();
    IntMatrix F(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<mpz_class> e(n, mpz_class(0));
        e[j] = 1;
        auto fj = elem_pow_mod(O, e, q, q);
        for (std::size_t k = 0; k < n; ++k) F(j, k) = fj[k];
    }
    return F;
}

}  // namespace

NfElem NumberFieldOrder::canon(NfElem x) {
    if (x.den < 0) {
        x.den = -x.den;
        for (auto& c : x.num) c = -c;
    }
    mpz_class g = x.den;
    for (const auto& c : x.num) g = gcd(g, c);
    if (g > 1) {
        x.den /= g;
        for (auto& c : x.num) c /= g;
    }
    return x;
}

NumberFieldOrder::NumberFieldOrder(ZPoly f, IntMatrix basis_num, mpz_class basis_den)
    : f_(std::move(f)), basis_num_(std::move(basis_num)), basis_den_(std::move(basis_den)) {
    int d = exact::zpoly_deg(f_);
    if (d < 1 || f_[static_cast<std::size_t>(d)] != 1)
        throw std::invalid_argument("NumberFieldOrder: monic polynomial required");
    n_ = static_cast<std::size_t>(d);
    if (basis_num_.rows() != n_ || basis_num_.cols() != n_ || basis_den_ <= 0)
        throw std::invalid_argument("NumberFieldOrder: bad basis shape");

    rat_inverse(basis_num_, basis_inv_num_, basis_inv_den_);
    // (B/d)^{-1} = d * B^{-1}.
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) basis_inv_num_(i, j) *= basis_den_;
    mpz_class g = content_with(basis_inv_num_, basis_inv_den_);
    if (g > 1) {
        basis_inv_den_ /= g;
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) basis_inv_num_(i, j) /= g;
    }

    // Multiplication table via polynomial arithmetic mod f.
    QPoly fq = exact::zpoly_to_q(f_);
    std::vector<QPoly> bp(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        QPoly p(n_);
        for (std::size_t k = 0; k < n_; ++k)
            p[k] = mpq_class(basis_num_(i, k), basis_den_);
        bp[i] = exact::qpoly_trim(std::move(p));
    }
    mult_.assign(n_, IntMatrix(n_, n_));
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = i; j < n_; ++j) {
            QPoly quo, rem;
            exact::qpoly_divrem(exact::qpoly_mul(bp[i], bp[j]), fq, quo, rem);
            rem.resize(n_, mpq_class(0));
            // Back to basis coordinates: v_basis = v_power * basis_inv.
            for (std::size_t k = 0; k < n_; ++k) {
                mpq_class s(0);
                for (std::size_t t = 0; t < n_; ++t)
                    s += rem[t] * mpq_class(basis_inv_num_(t, k), basis_inv_den_);
                s.canonicalize();
                if (s.get_den() != 1)
                    throw std::invalid_argument("NumberFieldOrder: basis not multiplicatively closed");
                mult_[i](j, k) = s.get_num();
                mult_[j](i, k) = s.get_num();
            }
        }

    mpz_class df = exact::zpoly_discriminant(f_);
    if (df == 0) throw ReduciblePolynomial("defining polynomial is not squarefree");
    mpz_class det = basis_num_.det();
    mpz_class dn = 1;
    for (std::size_t i = 0; i < n_; ++i) dn *= basis_den_;
    index_ = abs(dn / det);
    if (index_ * abs(det) != abs(dn))
        throw std::invalid_argument("NumberFieldOrder: basis does not contain Z[theta]");
    mpz_class i2 = index_ * index_;
    if (df % i2 != 0) throw std::invalid_argument("NumberFieldOrder: discriminant mismatch");
    disc_ = df / i2;
}

NfElem NumberFieldOrder::zero() const { return NfElem{std::vector<mpz_class>(n_, mpz_class(0)), 1}; }

NfElem NumberFieldOrder::from_int(const mpz_class& v) const {
    std::vector<mpq_class> p(n_, mpq_class(0));
    p[0] = mpq_class(v);
    return from_power_basis(p);
}

NfElem NumberFieldOrder::one() const { return from_int(1); }

NfElem NumberFieldOrder::theta() const {
    std::vector<mpq_class> p(n_, mpq_class(0));
    if (n_ >= 2) p[1] = 1;
    return from_power_basis(p);
}

NfElem NumberFieldOrder::add(const NfElem& x, const NfElem& y) const {
    NfElem r;
    r.den = lcm(x.den, y.den);
    mpz_class cx = r.den / x.den, cy = r.den / y.den;
    r.num.resize(n_);
    for (std::size_t k = 0; k < n_; ++k) r.num[k] = x.num[k] * cx + y.num[k] * cy;
    return canon(std::move(r));
}

NfElem NumberFieldOrder::neg(const NfElem& x) const {
    NfElem r = x;
    for (auto& c : r.num) c = -c;
    return r;
}

NfElem NumberFieldOrder::sub(const NfElem& x, const NfElem& y) const { return add(x, neg(y)); }

NfElem NumberFieldOrder::mul(const NfElem& x, const NfElem& y) const {
    NfElem r;
    r.den = x.den * y.den;
    r.num.assign(n_, mpz_class(0));
    for (std::size_t i = 0; i < n_; ++i) {
        if (x.num[i] == 0) continue;
        const IntMatrix& M = mult_[i];
        for (std::size_t j = 0; j < n_; ++j) {
            if (y.num[j] == 0) continue;
            mpz_class c = x.num[i] * y.num[j];
            for (std::size_t k = 0; k < n_; ++k)
                if (M(j, k) != 0) r.num[k] += c * M(j, k);
        }
    }
    return canon(std::move(r));
}

NfElem NumberFieldOrder::mul_int(const NfElem& x, const mpz_class& c) const {
    NfElem r = x;
    for (auto& v : r.num) v *= c;
    return canon(std::move(r));
}

NfElem NumberFieldOrder::pow(const NfElem& x, mpz_class e) const {
    if (e < 0) throw std::invalid_argument("pow: negative exponent");
    NfElem r = one(), b = x;
    while (e > 0) {
        if (mpz_odd_p(e.get_mpz_t())) r = mul(r, b);
        b = mul(b, b);
        e >>= 1;
    }
    return r;
}

bool NumberFieldOrder::is_zero(const NfElem& x) const {
    for (const auto& c : x.num)
        if (c != 0) return false;
    return true;
}

bool NumberFieldOrder::eq(const NfElem& x, const NfElem& y) const { return is_zero(sub(x, y)); }

IntMatrix NumberFieldOrder::mul_matrix(const NfElem& x) const {
    IntMatrix M(n_, n_);
    for (std::size_t i = 0; i < n_; ++i) {
        if (x.num[i] == 0) continue;
        const IntMatrix& T = mult_[i];
        for (std::size_t j = 0; j < n_; ++j)
            for (std::size_t k = 0; k < n_; ++k)
                if (T(j, k) != 0) M(j, k) += x.num[i] * T(j, k);
    }
    return M;
}

mpq_class NumberFieldOrder::norm(const NfElem& x) const {
    mpz_class dn = 1;
    for (std::size_t i = 0; i < n_; ++i) dn *= x.den;
    mpq_class r(mul_matrix(x).det(), dn);
    r.canonicalize();
    return r;
}

mpq_class NumberFieldOrder::trace(const NfElem& x) const {
    IntMatrix M = mul_matrix(x);
    mpz_class t = 0;
    for (std::size_t i = 0; i < n_; ++i) t += M(i, i);
    mpq_class r(t, x.den);
    r.canonicalize();
    return r;
}

NfElem NumberFieldOrder::inverse(const NfElem& x) const {
    if (is_zero(x)) throw std::invalid_argument("inverse of zero");
    IntMatrix M = mul_matrix(x);
    NfElem u = one();
    std::vector<mpq_class> rhs(n_);
    for (std::size_t k = 0; k < n_; ++k) rhs[k] = mpq_class(u.num[k] * x.den, u.den);
    std::vector<mpq_class> y;
    if (!exact::solve_left_rational(M, rhs, y))
        throw std::invalid_argument("inverse: singular multiplication matrix");
    NfElem r;
    r.den = 1;
    for (const auto& c : y) r.den = lcm(r.den, c.get_den());
    r.num.resize(n_);
    for (std::size_t k = 0; k < n_; ++k) {
        mpq_class v = y[k] * r.den;
        r.num[k] = v.get_num();
    }
    return canon(std::move(r));
}

std::vector<mpq_class> NumberFieldOrder::to_power_basis(const NfElem& x) const {
    std::vector<mpq_class> p(n_, mpq_class(0));
    for (std::size_t k = 0; k < n_; ++k) {
        mpq_class s(0);
        for (std::size_t i = 0; i < n_; ++i)
            s += mpq_class(x.num[i] * basis_num_(i, k), x.den * basis_den_);
        s.canonicalize();
        p[k] = s;
    }
    return p;
}

NfElem NumberFieldOrder::from_power_basis(const std::vector<mpq_class>& c) const {
    if (c.size() != n_) throw std::invalid_argument("from_power_basis: size mismatch");
    std::vector<mpq_class> v(n_, mpq_class(0));
    for (std::size_t k = 0; k < n_; ++k) {
        mpq_class s(0);
        for (std::size_t t = 0; t < n_; ++t)
            s += c[t] * mpq_class(basis_inv_num_(t, k), basis_inv_den_);
        s.canonicalize();
        v[k] = s;
    }
    NfElem r;
    r.den = 1;
    for (const auto& s : v) r.den = lcm(r.den, s.get_den());
    r.num.resize(n_);
    for (std::size_t k = 0; k < n_; ++k) {
        mpq_class s = v[k] * r.den;
        r.num[k] = s.get_num();
    }
    return canon(std::move(r));
}

std::string NumberFieldOrder::elem_str(const NfElem& x) const {
    std::ostringstream os;
    os << "(";
    for (std::size_t k = 0; k < n_; ++k) {
        if (k) os << ",";
        os << x.num[k].get_str();
    }
    os << ")/" << x.den.get_str();
    return os.str();
}

bool certify_irreducible(const ZPoly& f) {
    int d = exact::zpoly_deg(f);
    if (d == 1) return true;
    if (d < 1 || d > 62) return false;
    std::uint64_t mask = ~0ULL;
    std::uint64_t want = 1ULL | (1ULL << d);
    mpz_class q = 1;
    for (int tries = 0; tries < 120; ++tries) {
        mpz_nextprime(q.get_mpz_t(), q.get_mpz_t());
        FpPolyCtx c{q};
        FpPoly fq = exact::fp_reduce(f, c);
        if (exact::fp_trim(fq).size() != static_cast<std::size_t>(d) + 1) continue;
        FpPoly der(fq.size() - 1);
        for (std::size_t i = 1; i < fq.size(); ++i) der[i - 1] = fq[i] * i % q;
        if (exact::fp_gcd(fq, exact::fp_trim(der), c).size() > 1) continue;  // not squarefree mod q
        std::uint64_t sums = 1;
        for (const auto& [g, mult] : exact::fp_factor(fq, c)) {
            int dg = static_cast<int>(g.size()) - 1;
            for (unsigned t = 0; t < mult; ++t) sums |= sums << dg;
        }
        mask &= sums;
        if (mask == want) return true;
    }
    return false;
}

namespace {

// Trial division then Pollard-Brent rho; returns the sorted distinct primes.
std::vector<mpz_class> prime_support(mpz_class v) {
    std::vector<mpz_class> primes;
    v = abs(v);
    auto push = [&](const mpz_class& p) {
        if (std::find(primes.begin(), primes.end(), p) == primes.end()) primes.push_back(p);
    };
    for (long q : {2L, 3L, 5L}) {
        while (v % q == 0) {
            v /= q;
            push(q);
        }
    }
    for (long q = 7; q < 100000 && v > 1; q += 2) {
        if (v % q == 0) {
            push(q);
            while (v % q == 0) v /= q;
        }
    }
    std::vector<mpz_class> stack;
    if (v > 1) stack.push_back(v);
    gmp_randclass rng(gmp_randinit_default);
    rng.seed(42);
    while (!stack.empty()) {
        mpz_class m = stack.back();
        stack.pop_back();
        if (m == 1) continue;
        if (mpz_probab_prime_p(m.get_mpz_t(), 32)) {
            push(m);
            continue;
        }
        // Perfect power?
        if (mpz_perfect_power_p(m.get_mpz_t())) {
            for (unsigned k = 2; k <= mpz_sizeinbase(m.get_mpz_t(), 2); ++k) {
                mpz_class r;
                if (mpz_root(r.get_mpz_t(), m.get_mpz_t(), k) != 0) {
                    stack.push_back(r);
                    m = 1;
                    break;
                }
            }
            if (m == 1) continue;
        }
        // Pollard-Brent.
        bool split = false;
        for (int attempt = 0; attempt < 16 && !split; ++attempt) {
            mpz_class c = rng.get_z_range(m - 3) + 1;
            mpz_class y = rng.get_z_range(m - 2) + 1, g = 1, r = 1, qacc = 1, x, ys;
            while (g == 1 && r < (1 << 22)) {
                x = y;
                for (mpz_class i = 0; i < r; ++i) y = (y * y + c) % m;
                mpz_class k = 0;
                while (k < r && g == 1) {
                    ys = y;
                    mpz_class lim = std::min(mpz_class(128), mpz_class(r - k));
                    for (mpz_class i = 0; i < lim; ++i) {
                        y = (y * y + c) % m;
                        qacc = qacc * abs(x - y) % m;
                    }
                    g = gcd(qacc, m);
                    k += 128;
                }
                r <<= 1;
            }
            if (g == m) {
                g = 1;
                while (g == 1) {
                    ys = (ys * ys + c) % m;
                    g = gcd(abs(x - ys), m);
                }
            }
            if (g > 1 && g < m) {
                stack.push_back(g);
                stack.push_back(m / g);
                split = true;
            }
        }
        if (!split)
            throw std::runtime_error("prime_support: failed to factor " + m.get_str());
    }
    std::sort(primes.begin(), primes.end());
    return primes;
}

// One Round-2 enlargement step at q; returns true if the order grew.
bool round2_step(NumberFieldOrder& O, const mpz_class& q) {
    std::size_t n = O.degree();
    IntMatrix F = frobenius_matrix(O, q);
    unsigned m = 0;
    mpz_class qm = 1;
    while (qm < mpz_class(static_cast<unsigned long>(n))) {
        qm *= q;
        ++m;
    }
    if (m == 0) m = 1;
    IntMatrix Fm = F;
    for (unsigned i = 1; i < m; ++i) Fm = exact::fp_mat_mul(Fm, F, q);
    IntMatrix rad = exact::fp_left_kernel_mat(Fm, q);

    IntMatrix gens(rad.rows() + n, n);
    for (std::size_t i = 0; i < rad.rows(); ++i)
        for (std::size_t j = 0; j < n; ++j) gens(i, j) = rad(i, j);
    for (std::size_t i = 0; i < n; ++i) gens(rad.rows() + i, i) = q;
    IntMatrix U = exact::hnf(gens);
    mpz_class e = U.det();

    IntMatrix Uinv_num;
    mpz_class Uinv_den;
    rat_inverse(U, Uinv_num, Uinv_den);
    IntMatrix adjU(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            mpz_class v = e * Uinv_num(i, j);
            if (v % Uinv_den != 0) throw std::logic_error("round2_step: adjugate not integral");
            adjU(i, j) = v / Uinv_den;
        }

    IntMatrix C(n, 0);
    for (std::size_t g = 0; g < n; ++g) {
        NfElem gv;
        gv.den = 1;
        gv.num.resize(n);
        for (std::size_t k = 0; k < n; ++k) gv.num[k] = U(g, k);
        C = C.hstack(O.mul_matrix(gv) * adjU);
    }
    IntMatrix W = exact::hnf(exact::mod_preimage_lattice(C, q * e));

    bool trivial = true;
    for (std::size_t i = 0; i < n && trivial; ++i)
        for (std::size_t j = 0; j < n && trivial; ++j)
            if (W(i, j) != (i == j ? q : mpz_class(0))) trivial = false;
    if (trivial) return false;

    IntMatrix nb = W * O.basis_num();
    mpz_class nd = q * O.basis_den();
    mpz_class g = content_with(nb, nd);
    if (g > 1) {
        nd /= g;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) nb(i, j) /= g;
    }
    O = NumberFieldOrder(O.defining_polynomial(), nb, nd);
    return true;
}

}  // namespace

NumberFieldOrder maximal_order(const ZPoly& f, const std::vector<mpz_class>& extra_primes) {
    int d = exact::zpoly_deg(f);
    if (d < 1 || f[static_cast<std::size_t>(d)] != 1)
        throw std::invalid_argument("maximal_order: monic polynomial required");
    if (!certify_irreducible(f))
        throw ReduciblePolynomial("no irreducibility certificate found");
    std::size_t n = static_cast<std::size_t>(d);
    NumberFieldOrder O(f, IntMatrix::identity(n), 1);

    mpz_class df = O.discriminant();
    std::vector<mpz_class> qs;
    for (const auto& q : prime_support(df))
        if (df % (q * q) == 0) qs.push_back(q);
    for (const auto& q : extra_primes)
        if (std::find(qs.begin(), qs.end(), q) == qs.end()) qs.push_back(q);

    for (const auto& q : qs)
        while (round2_step(O, q)) {
        }
    return O;
}

NumberFieldOrder maximalize_at(NumberFieldOrder O, const std::vector<mpz_class>& primes) {
    for (const auto& q : primes)
        while (round2_step(O, q)) {
        }
    return O;
}

std::vector<mpz_class> prime_factor_support(const mpz_class& v) { return prime_support(v); }

namespace {

// Quotient of the F_q-algebra O/qO by the subspace spanned by the rref rows
// `ideal` (an ideal): coset coordinates are read off the non-pivot columns.
struct AlgebraQuotient {
    const NumberFieldOrder* O;
    mpz_class q;
    IntMatrix ideal;                  // rref rows, coordinates in O/qO
    std::vector<std::size_t> pivots;  // pivot column of each ideal row
    std::vector<std::size_t> free_cols;

    std::size_t dim() const { return free_cols.size(); }

    std::vector<mpz_class> reduce_full(std::vector<mpz_class> v) const {
        for (auto& c : v) {
            c %= q;
            if (c < 0) c += q;
        }
        for (std::size_t r = 0; r < ideal.rows(); ++r) {
            mpz_class c = v[pivots[r]];
            if (c == 0) continue;
            for (std::size_t j = 0; j < v.size(); ++j) {
                v[j] = (v[j] - c * ideal(r, j)) % q;
                if (v[j] < 0) v[j] += q;
            }
        }
        return v;
    }
    std::vector<mpz_class> project(const std::vector<mpz_class>& v_full) const {
        auto v = reduce_full(v_full);
        std::vector<mpz_class> w(dim());
        for (std::size_t i = 0; i < dim(); ++i) w[i] = v[free_cols[i]];
        return w;
    }
    std::vector<mpz_class> lift(const std::vector<mpz_class>& w) const {
        std::vector<mpz_class> v(O->degree(), mpz_class(0));
        for (std::size_t i = 0; i < dim(); ++i) v[free_cols[i]] = w[i];
        return v;
    }
    std::vector<mpz_class> qmul(const std::vector<mpz_class>& u,
                                const std::vector<mpz_class>& w) const {
        auto a = lift(u), b = lift(w);
        std::size_t n = O->degree();
        std::vector<mpz_class> r(n, mpz_class(0));
        for (std::size_t i = 0; i < n; ++i) {
            if (a[i] == 0) continue;
            const IntMatrix& M = O->mult(i);
            for (std::size_t j = 0; j < n; ++j) {
                if (b[j] == 0) continue;
                mpz_class c = a[i] * b[j] % q;
                for (std::size_t k = 0; k < n; ++k)
                    if (M(j, k) != 0) r[k] = (r[k] + c * M(j, k)) % q;
            }
        }
        return project(r);
    }
};

AlgebraQuotient make_quotient(const NumberFieldOrder& O, const mpz_class& q,
                              const IntMatrix& ideal_rows) {
    AlgebraQuotient Q;
    Q.O = &O;
    Q.q = q;
    Q.ideal = exact::fp_rref(ideal_rows, q, &Q.pivots);
    std::size_t n = O.degree(), r = 0;
    for (std::size_t j = 0; j < n; ++j) {
        if (r < Q.pivots.size() && Q.pivots[r] == j)
            ++r;
        else
            Q.free_cols.push_back(j);
    }
    return Q;
}

}  // namespace

std::vector<PrimeFactorSlot> factor_prime(const NumberFieldOrder& O, const mpz_class& q) {
    std::size_t n = O.degree();
    IntMatrix F = frobenius_matrix(O, q);
    unsigned m = 0;
    mpz_class qm = 1;
    while (qm < mpz_class(static_cast<unsigned long>(n))) {
        qm *= q;
        ++m;
    }
    if (m == 0) m = 1;
    IntMatrix Fm = F;
    for (unsigned i = 1; i < m; ++i) Fm = exact::fp_mat_mul(Fm, F, q);
    IntMatrix nil = exact::fp_left_kernel_mat(Fm, q);

    std::vector<IntMatrix> work{nil}, maximal_ideals;
    while (!work.empty()) {
        IntMatrix ideal = work.back();
        work.pop_back();
        AlgebraQuotient Q = make_quotient(O, q, ideal);
        std::size_t d = Q.dim();
        if (d == 0) throw std::logic_error("factor_prime: quotient collapsed");
        // Frobenius on the quotient.
        IntMatrix FQ(d, d);
        for (std::size_t j = 0; j < d; ++j) {
            std::vector<mpz_class> e(d, mpz_class(0));
            e[j] = 1;
            auto img = Q.project(elem_pow_mod(O, Q.lift(e), q, q));
            for (std::size_t k = 0; k < d; ++k) FQ(j, k) = img[k];
        }
        IntMatrix FmI = FQ - IntMatrix::identity(d);
        IntMatrix fixed = exact::fp_left_kernel_mat(FmI, q);
        if (fixed.rows() <= 1) {
            maximal_ideals.push_back(Q.ideal);
            continue;
        }
        // Pick a non-scalar element of the Berlekamp subalgebra.
        std::vector<mpz_class> onev = Q.project(O.one().num);
        std::vector<mpz_class> z;
        for (std::size_t i = 0; i < fixed.rows() && z.empty(); ++i) {
            std::vector<mpz_class> cand(d);
            for (std::size_t k = 0; k < d; ++k) cand[k] = fixed(i, k);
            // Scalar iff cand is proportional to 1.
            bool scalar = true;
            mpz_class lambda = -1;
            for (std::size_t k = 0; k < d && scalar; ++k) {
                if (onev[k] == 0) {
                    if (cand[k] != 0) scalar = false;
                } else if (lambda < 0) {
                    mpz_class inv;
                    mpz_invert(inv.get_mpz_t(), onev[k].get_mpz_t(), q.get_mpz_t());
                    lambda = cand[k] * inv % q;
                } else if (cand[k] % q != lambda * onev[k] % q) {
                    scalar = false;
                }
            }
            if (!scalar) z = cand;
        }
        if (z.empty()) throw std::logic_error("factor_prime: no splitting element");
        // Minimal polynomial of z: first linear dependency among 1, z, z^2, ...
        std::vector<std::vector<mpz_class>> pows{onev};
        FpPoly minpoly;
        for (std::size_t k = 1; k <= d + 1 && minpoly.empty(); ++k) {
            pows.push_back(Q.qmul(pows.back(), z));
            IntMatrix P(k, d);
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = 0; j < d; ++j) P(i, j) = pows[i][j];
            std::vector<mpz_class> x;
            if (exact::fp_solve_left(P, pows[k], x, q)) {
                minpoly.assign(k + 1, mpz_class(0));
                for (std::size_t i = 0; i < k; ++i) minpoly[i] = (q - x[i] % q) % q;
                minpoly[k] = 1;
            }
        }
        if (minpoly.empty()) throw std::logic_error("factor_prime: minimal polynomial not found");
        FpPolyCtx ctx{q};
        auto roots = exact::fp_roots(minpoly, ctx);
        if (roots.size() < 2) throw std::logic_error("factor_prime: splitting element did not split");
        for (const auto& lambda : roots) {
            // Ideal generated by (z - lambda) in the quotient, pulled back.
            std::vector<mpz_class> zl(d);
            for (std::size_t k = 0; k < d; ++k) {
                zl[k] = (z[k] - lambda * onev[k]) % q;
                if (zl[k] < 0) zl[k] += q;
            }
            IntMatrix rows(d + Q.ideal.rows(), n);
            for (std::size_t j = 0; j < d; ++j) {
                std::vector<mpz_class> e(d, mpz_class(0));
                e[j] = 1;
                auto prod = Q.lift(Q.qmul(zl, e));
                for (std::size_t k = 0; k < n; ++k) rows(j, k) = prod[k];
            }
            for (std::size_t i = 0; i < Q.ideal.rows(); ++i)
                for (std::size_t k = 0; k < n; ++k) rows(d + i, k) = Q.ideal(i, k);
            work.push_back(rows);
        }
    }

    // Lattice product helper for the verification below.
    auto lat_mul = [&](const IntMatrix& A, const IntMatrix& B) {
        IntMatrix prod(n * n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                NfElem a{std::vector<mpz_class>(n), 1}, b{std::vector<mpz_class>(n), 1};
                for (std::size_t k = 0; k < n; ++k) {
                    a.num[k] = A(i, k);
                    b.num[k] = B(j, k);
                }
                NfElem c = O.mul(a, b);
                if (c.den != 1) throw std::logic_error("factor_prime: non-integral product");
                for (std::size_t k = 0; k < n; ++k) prod(i * n + j, k) = c.num[k];
            }
        mpz_class dmul = abs(A.det()) * abs(B.det());
        return exact::hnf_mod(prod, dmul);
    };

    std::vector<PrimeFactorSlot> out;
    for (const auto& mi : maximal_ideals) {
        PrimeFactorSlot s;
        s.q = q;
        s.f = static_cast<unsigned>(n - mi.rows());
        IntMatrix gens(mi.rows() + n, n);
        for (std::size_t i = 0; i < mi.rows(); ++i)
            for (std::size_t j = 0; j < n; ++j) gens(i, j) = mi(i, j);
        for (std::size_t i = 0; i < n; ++i) gens(mi.rows() + i, i) = q;
        s.hnf = exact::hnf(gens);
        // e via the stabilizing power of the maximal ideal: m^n cuts out the
        // complementary components, so dim of the local factor = n - dim m^n.
        AlgebraQuotient Qm = make_quotient(O, q, mi);
        IntMatrix power = Qm.ideal;  // rref rows of m
        for (std::size_t step = 1; step < n; ++step) {
            IntMatrix next(power.rows() * mi.rows(), n);
            for (std::size_t i = 0; i < power.rows(); ++i)
                for (std::size_t j = 0; j < mi.rows(); ++j) {
                    NfElem a{std::vector<mpz_class>(n), 1}, b{std::vector<mpz_class>(n), 1};
                    for (std::size_t k = 0; k < n; ++k) {
                        a.num[k] = power(i, k);
                        b.num[k] = mi(j, k);
                    }
                    NfElem c = O.mul(a, b);
                    for (std::size_t k = 0; k < n; ++k) next(i * mi.rows() + j, k) = c.num[k];
                }
            IntMatrix nr = exact::fp_rref(next, q, nullptr);
            if (nr.rows() == power.rows()) break;
            power = nr;
        }
        std::size_t local_dim = n - power.rows();
        if (local_dim % s.f != 0) throw std::logic_error("factor_prime: e*f bookkeeping failed");
        s.e = static_cast<unsigned>(local_dim / s.f);
        out.push_back(std::move(s));
    }

    unsigned total = 0;
    for (const auto& s : out) total += s.e * s.f;
    if (total != n) throw std::logic_error("factor_prime: sum e*f != degree");

    IntMatrix prod = IntMatrix::identity(n);
    for (const auto& s : out)
        for (unsigned t = 0; t < s.e; ++t) prod = lat_mul(prod, s.hnf);
    IntMatrix qI(n, n);
    for (std::size_t i = 0; i < n; ++i) qI(i, i) = q;
    if (exact::hnf(prod) != exact::hnf(qI))
        throw std::logic_error("factor_prime: product of prime powers != (q)");
    return out;
}

}  // namespace cft::nf
