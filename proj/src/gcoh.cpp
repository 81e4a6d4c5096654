#include "cftower/gcoh/gcoh.hpp"

#include <random>

#include "cftower/exact/fp_matrix.hpp"

namespace cft::gcoh {

namespace {

mpz_class mod_pos(const mpz_class& a, const mpz_class& p) {
    mpz_class r = a % p;
    if (r < 0) r += p;
    return r;
}

void apply_act(const IntMatrix& A, const mpz_class* in, mpz_class* out, unsigned dim,
               const mpz_class& p) {
    for (unsigned i = 0; i < dim; ++i) {
        mpz_class s = 0;
        for (unsigned j = 0; j < dim; ++j) s += A(i, j) * in[j];
        out[i] = mod_pos(s, p);
    }
}

}  // namespace

unsigned FiniteGroupTable::inv(unsigned g) const {
    for (unsigned h = 0; h < n; ++h)
        if (mul[g][h] == id) return h;
    throw std::logic_error("group table: no inverse");
}

void FiniteGroupTable::spot_check(std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<unsigned> pick(0, n - 1);
    for (int t = 0; t < 1000; ++t) {
        unsigned a = pick(rng), b = pick(rng), c = pick(rng);
        if (mul[mul[a][b]][c] != mul[a][mul[b][c]])
            throw std::logic_error("group table: associativity fails");
    }
    for (unsigned g = 0; g < n; ++g) (void)inv(g);
    if (mul[id][0] != 0) throw std::logic_error("group table: identity fails");
}

FiniteGroupTable FiniteGroupTable::cyclic(unsigned m) {
    FiniteGroupTable G;
    G.n = m;
    G.id = 0;
    G.mul.assign(m, std::vector<unsigned>(m));
    for (unsigned a = 0; a < m; ++a)
        for (unsigned b = 0; b < m; ++b) G.mul[a][b] = (a + b) % m;
    return G;
}

FiniteGroupTable FiniteGroupTable::product(const FiniteGroupTable& A, const FiniteGroupTable& B) {
    FiniteGroupTable G;
    G.n = A.n * B.n;
    G.id = A.id * B.n + B.id;
    G.mul.assign(G.n, std::vector<unsigned>(G.n));
    for (unsigned a = 0; a < A.n; ++a)
        for (unsigned b = 0; b < B.n; ++b)
            for (unsigned c = 0; c < A.n; ++c)
                for (unsigned d = 0; d < B.n; ++d)
                    G.mul[a * B.n + b][c * B.n + d] = A.mul[a][c] * B.n + B.mul[b][d];
    return G;
}

FiniteGroupTable FiniteGroupTable::heisenberg(unsigned p) {
    FiniteGroupTable G;
    G.n = p * p * p;
    G.id = 0;
    G.mul.assign(G.n, std::vector<unsigned>(G.n));
    for (unsigned a = 0; a < p; ++a)
        for (unsigned b = 0; b < p; ++b)
            for (unsigned c = 0; c < p; ++c)
                for (unsigned a2 = 0; a2 < p; ++a2)
                    for (unsigned b2 = 0; b2 < p; ++b2)
                        for (unsigned c2 = 0; c2 < p; ++c2)
                            G.mul[(a * p + b) * p + c][(a2 * p + b2) * p + c2] =
                                (((a + a2) % p) * p + (b + b2) % p) * p +
                                (c + c2 + a * b2) % p;
    return G;
}

Coefficients Coefficients::trivial(const FiniteGroupTable& G, const mpz_class& p) {
    Coefficients M;
    M.p = p;
    M.dim = 1;
    IntMatrix one(1, 1);
    one(0, 0) = 1;
    M.act.assign(G.n, one);
    return M;
}

Coefficients Coefficients::twist(const FiniteGroupTable& G, const mpz_class& p, const Cochain& y) {
    Coefficients M;
    M.p = p;
    M.dim = 2;
    M.act.reserve(G.n);
    for (unsigned g = 0; g < G.n; ++g) {
        IntMatrix A(2, 2);
        A(0, 0) = 1;
        A(0, 1) = mod_pos(y.v[g], p);
        A(1, 1) = 1;
        M.act.push_back(A);
    }
    return M;
}

Cochain coboundary(const FiniteGroupTable& G, const Coefficients& M, const Cochain& c) {
    const unsigned n = G.n, d = M.dim;
    const mpz_class& p = M.p;
    Cochain out;
    out.dim = d;
    std::vector<mpz_class> tmp(d);
    if (c.degree == 0) {
        out.degree = 1;
        out.v.assign(static_cast<std::size_t>(n) * d, 0);
        for (unsigned g = 0; g < n; ++g) {
            apply_act(M.act[g], c.v.data(), tmp.data(), d, p);
            for (unsigned i = 0; i < d; ++i) out.v[g * d + i] = mod_pos(tmp[i] - c.v[i], p);
        }
    } else if (c.degree == 1) {
        out.degree = 2;
        out.v.assign(static_cast<std::size_t>(n) * n * d, 0);
        for (unsigned g = 0; g < n; ++g)
            for (unsigned h = 0; h < n; ++h) {
                apply_act(M.act[g], c.v.data() + static_cast<std::size_t>(h) * d, tmp.data(), d, p);
                unsigned gh = G.mul[g][h];
                for (unsigned i = 0; i < d; ++i)
                    out.v[(static_cast<std::size_t>(g) * n + h) * d + i] =
                        mod_pos(tmp[i] - c.v[gh * d + i] + c.v[g * d + i], p);
            }
    } else if (c.degree == 2) {
        out.degree = 3;
        out.v.assign(static_cast<std::size_t>(n) * n * n * d, 0);
        for (unsigned g = 0; g < n; ++g)
            for (unsigned h = 0; h < n; ++h)
                for (unsigned k = 0; k < n; ++k) {
                    apply_act(M.act[g],
                              c.v.data() + (static_cast<std::size_t>(h) * n + k) * d, tmp.data(),
                              d, p);
                    unsigned gh = G.mul[g][h], hk = G.mul[h][k];
                    for (unsigned i = 0; i < d; ++i)
                        out.v[((static_cast<std::size_t>(g) * n + h) * n + k) * d + i] = mod_pos(
                            tmp[i] - c.v[(static_cast<std::size_t>(gh) * n + k) * d + i] +
                                c.v[(static_cast<std::size_t>(g) * n + hk) * d + i] -
                                c.v[(static_cast<std::size_t>(g) * n + h) * d + i],
                            p);
                }
    } else {
        throw std::invalid_argument("coboundary: degree must be 0, 1 or 2");
    }
    return out;
}

bool is_cocycle(const FiniteGroupTable& G, const Coefficients& M, const Cochain& c) {
    const unsigned n = G.n, d = M.dim;
    const mpz_class& p = M.p;
    std::vector<mpz_class> tmp(d);
    if (c.degree == 1) {
        for (unsigned g = 0; g < n; ++g)
            for (unsigned h = 0; h < n; ++h) {
                apply_act(M.act[g], c.v.data() + static_cast<std::size_t>(h) * d, tmp.data(), d, p);
                unsigned gh = G.mul[g][h];
                for (unsigned i = 0; i < d; ++i)
                    if (mod_pos(tmp[i] - c.v[gh * d + i] + c.v[g * d + i], p) != 0) return false;
            }
        return true;
    }
    if (c.degree == 2) {
        for (unsigned g = 0; g < n; ++g)
            for (unsigned h = 0; h < n; ++h)
                for (unsigned k = 0; k < n; ++k) {
                    apply_act(M.act[g],
                              c.v.data() + (static_cast<std::size_t>(h) * n + k) * d, tmp.data(),
                              d, p);
                    unsigned gh = G.mul[g][h], hk = G.mul[h][k];
                    for (unsigned i = 0; i < d; ++i)
                        if (mod_pos(tmp[i] - c.v[(static_cast<std::size_t>(gh) * n + k) * d + i] +
                                        c.v[(static_cast<std::size_t>(g) * n + hk) * d + i] -
                                        c.v[(static_cast<std::size_t>(g) * n + h) * d + i],
                                    p) != 0)
                            return false;
                }
        return true;
    }
    throw std::invalid_argument("is_cocycle: degree must be 1 or 2");
}

Cochain cup(const FiniteGroupTable& G, const Coefficients& M, const Cochain& x, const Cochain& w) {
    if (x.degree != 1 || w.degree != 1 || x.dim != 1 || w.dim != M.dim)
        throw std::invalid_argument("cup: expects scalar 1-cochain cup M-valued 1-cochain");
    const unsigned n = G.n, d = M.dim;
    const mpz_class& p = M.p;
    Cochain out;
    out.degree = 2;
    out.dim = d;
    out.v.assign(static_cast<std::size_t>(n) * n * d, 0);
    std::vector<mpz_class> tmp(d);
    for (unsigned g = 0; g < n; ++g) {
        if (mod_pos(x.v[g], p) == 0) continue;
        for (unsigned h = 0; h < n; ++h) {
            apply_act(M.act[g], w.v.data() + static_cast<std::size_t>(h) * d, tmp.data(), d, p);
            for (unsigned i = 0; i < d; ++i)
                out.v[(static_cast<std::size_t>(g) * n + h) * d + i] = mod_pos(x.v[g] * tmp[i], p);
        }
    }
    return out;
}

IntMatrix d1_matrix(const FiniteGroupTable& G, const Coefficients& M) {
    const unsigned n = G.n, d = M.dim;
    IntMatrix A(static_cast<long>(n) * d, static_cast<long>(n) * n * d);
    Cochain e;
    e.degree = 1;
    e.dim = d;
    e.v.assign(static_cast<std::size_t>(n) * d, 0);
    for (unsigned g = 0; g < n; ++g)
        for (unsigned i = 0; i < d; ++i) {
            e.v[g * d + i] = 1;
            Cochain de = coboundary(G, M, e);
            for (std::size_t j = 0; j < de.v.size(); ++j)
                A(static_cast<long>(g) * d + i, static_cast<long>(j)) = de.v[j];
            e.v[g * d + i] = 0;
        }
    return A;
}

std::optional<Cochain> trivialize(const FiniteGroupTable& G, const Coefficients& M,
                                  const Cochain& f) {
    if (f.degree != 2 || f.dim != M.dim) throw std::invalid_argument("trivialize: degree-2 target");
    IntMatrix A = d1_matrix(G, M);
    std::vector<mpz_class> b(f.v.size());
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = mod_pos(f.v[i], M.p);
    std::vector<mpz_class> x;
    if (!exact::fp_solve_left(A, b, x, M.p)) return std::nullopt;
    Cochain k;
    k.degree = 1;
    k.dim = M.dim;
    k.v = std::move(x);
    return k;
}

bool cohomologous2(const FiniteGroupTable& G, const Coefficients& M, const Cochain& a,
                   const Cochain& b) {
    Cochain diff;
    diff.degree = 2;
    diff.dim = M.dim;
    diff.v.resize(a.v.size());
    for (std::size_t i = 0; i < a.v.size(); ++i) diff.v[i] = mod_pos(a.v[i] - b.v[i], M.p);
    return trivialize(G, M, diff).has_value();
}

std::vector<Cochain> h1_basis(const FiniteGroupTable& G, const mpz_class& p) {
    // Trivial coefficients: d^0 = 0, so H^1 = Z^1 = Hom(G, Z/p).
    Coefficients M = Coefficients::trivial(G, p);
    IntMatrix K = exact::fp_left_kernel_mat(d1_matrix(G, M), p);
    std::vector<Cochain> basis;
    for (long r = 0; r < K.rows(); ++r) {
        Cochain c;
        c.degree = 1;
        c.dim = 1;
        c.v.resize(G.n);
        for (unsigned g = 0; g < G.n; ++g) c.v[g] = K(r, g);
        basis.push_back(std::move(c));
    }
    return basis;
}

bool set_contains(const FiniteGroupTable& G, const mpz_class& p, const MasseySet& S,
                  const Cochain& c) {
    // c - rep = sum lambda_i ind_i + d^1 f: one joint linear solve.
    Coefficients M = Coefficients::trivial(G, p);
    IntMatrix D = d1_matrix(G, M);
    IntMatrix A(D.rows() + static_cast<long>(S.ind.size()), D.cols());
    for (long r = 0; r < D.rows(); ++r)
        for (long j = 0; j < D.cols(); ++j) A(r, j) = D(r, j);
    for (std::size_t i = 0; i < S.ind.size(); ++i)
        for (long j = 0; j < D.cols(); ++j)
            A(D.rows() + static_cast<long>(i), j) = mod_pos(S.ind[i].v[j], p);
    std::vector<mpz_class> b(c.v.size());
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = mod_pos(c.v[i] - S.rep.v[i], p);
    std::vector<mpz_class> x;
    return exact::fp_solve_left(A, b, x, p);
}

bool sets_equal(const FiniteGroupTable& G, const mpz_class& p, const MasseySet& A,
                const MasseySet& B) {
    auto shifted = [&](const MasseySet& S, const Cochain& dir) -> Cochain {
        Cochain c = S.rep;
        for (std::size_t i = 0; i < c.v.size(); ++i) c.v[i] = mod_pos(c.v[i] + dir.v[i], p);
        return c;
    };
    if (!set_contains(G, p, B, A.rep) || !set_contains(G, p, A, B.rep)) return false;
    for (const auto& d : A.ind)
        if (!set_contains(G, p, B, shifted(A, d))) return false;
    for (const auto& d : B.ind)
        if (!set_contains(G, p, A, shifted(B, d))) return false;
    return true;
}

namespace {

Cochain neg2(const Cochain& c, const mpz_class& p) {
    Cochain out = c;
    for (auto& t : out.v) t = mod_pos(-t, p);
    return out;
}

Cochain dwyer_rep(const FiniteGroupTable& G, const mpz_class& p, const Cochain& x,
                  const Cochain& kxy, const Cochain& kyz, const Cochain& z) {
    Cochain rep;
    rep.degree = 2;
    rep.dim = 1;
    rep.v.assign(static_cast<std::size_t>(G.n) * G.n, 0);
    for (unsigned g = 0; g < G.n; ++g)
        for (unsigned h = 0; h < G.n; ++h)
            rep.v[static_cast<std::size_t>(g) * G.n + h] =
                mod_pos(x.v[g] * kyz.v[h] + kxy.v[g] * z.v[h], p);
    return rep;
}

std::vector<Cochain> cup_indeterminacy(const FiniteGroupTable& G, const mpz_class& p,
                                       const Cochain& x, const Cochain& z, const Cochain* y) {
    Coefficients M = Coefficients::trivial(G, p);
    std::vector<Cochain> ind;
    for (const auto& e : h1_basis(G, p)) {
        ind.push_back(cup(G, M, x, e));
        ind.push_back(cup(G, M, e, z));
        if (y) ind.push_back(cup(G, M, *y, e));
    }
    return ind;
}

}  // namespace

MasseySet massey_dwyer(const FiniteGroupTable& G, const mpz_class& p, const Cochain& x,
                       const Cochain& y, const Cochain& z) {
    Coefficients M = Coefficients::trivial(G, p);
    auto kxy = trivialize(G, M, neg2(cup(G, M, x, y), p));
    if (!kxy) throw CupNonzero("massey_dwyer: x cup y is not a coboundary");
    auto kyz = trivialize(G, M, neg2(cup(G, M, y, z), p));
    if (!kyz) throw CupNonzero("massey_dwyer: y cup z is not a coboundary");
    return MasseySet{dwyer_rep(G, p, x, *kxy, *kyz, z), cup_indeterminacy(G, p, x, z, nullptr)};
}

std::vector<Cochain> massey_dwyer_all(const FiniteGroupTable& G, const mpz_class& p,
                                      const Cochain& x, const Cochain& y, const Cochain& z) {
    Coefficients M = Coefficients::trivial(G, p);
    auto kxy = trivialize(G, M, neg2(cup(G, M, x, y), p));
    auto kyz = trivialize(G, M, neg2(cup(G, M, y, z), p));
    if (!kxy || !kyz) throw CupNonzero("massey_dwyer_all: cup obstruction");
    std::vector<Cochain> h1 = h1_basis(G, p);
    unsigned pu = static_cast<unsigned>(p.get_ui());
    std::vector<Cochain> reps;
    // Both k's vary over (solution + Z^1); coboundary shifts of k only move
    // the representative by a coboundary, so ranging over H^1 classes covers
    // the set of classes.
    std::vector<unsigned> idx(2 * h1.size(), 0);
    for (;;) {
        Cochain a = *kxy, b = *kyz;
        for (std::size_t i = 0; i < h1.size(); ++i)
            for (unsigned g = 0; g < G.n; ++g) {
                a.v[g] = mod_pos(a.v[g] + idx[i] * h1[i].v[g], p);
                b.v[g] = mod_pos(b.v[g] + idx[h1.size() + i] * h1[i].v[g], p);
            }
        reps.push_back(dwyer_rep(G, p, x, a, b, z));
        std::size_t j = 0;
        while (j < idx.size() && ++idx[j] == pu) idx[j++] = 0;
        if (j == idx.size()) break;
    }
    return reps;
}

MasseySet massey_via_twist(const FiniteGroupTable& G, const mpz_class& p, const Cochain& x,
                           const Cochain& y, const Cochain& z) {
    Coefficients M = Coefficients::trivial(G, p);
    auto tz = trivialize(G, M, neg2(cup(G, M, y, z), p));
    if (!tz) throw CupNonzero("massey_via_twist: y cup z is not a coboundary");
    auto tx = trivialize(G, M, neg2(cup(G, M, y, x), p));
    if (!tx) throw CupNonzero("massey_via_twist: y cup x is not a coboundary");
    // First V_y-coordinate of x cup w_z - w_x cup z; the second vanishes and
    // the preimage under H^2(F_p) -> H^2(V_y) is this class up to y cup H^1.
    Cochain rep;
    rep.degree = 2;
    rep.dim = 1;
    rep.v.assign(static_cast<std::size_t>(G.n) * G.n, 0);
    for (unsigned g = 0; g < G.n; ++g)
        for (unsigned h = 0; h < G.n; ++h)
            rep.v[static_cast<std::size_t>(g) * G.n + h] =
                mod_pos(x.v[g] * (tz->v[h] + y.v[g] * z.v[h]) - tx->v[g] * z.v[h], p);
    return MasseySet{std::move(rep), cup_indeterminacy(G, p, x, z, &y)};
}

Cochain half_cup_witness(const FiniteGroupTable& G, const mpz_class& p, const Cochain& x,
                         const Cochain& y, const Cochain& t_y) {
    Coefficients M = Coefficients::trivial(G, p);
    Coefficients Vx = Coefficients::twist(G, p, x);
    {
        Cochain dt = coboundary(G, M, t_y);
        Cochain target = neg2(cup(G, M, x, y), p);
        for (std::size_t i = 0; i < dt.v.size(); ++i)
            if (mod_pos(dt.v[i] - target.v[i], p) != 0)
                throw std::invalid_argument("half_cup_witness: t_y does not trivialize -x cup y");
    }
    mpz_class half, two(2);
    if (mpz_invert(half.get_mpz_t(), two.get_mpz_t(), p.get_mpz_t()) == 0)
        throw std::invalid_argument("half_cup_witness: p must be odd");

    // t_x = x(x-1)/2, w_x = (t_x, x), w_y = (t_y, y) in V_x.
    auto lift = [&](const Cochain& t, const Cochain& u) -> Cochain {
        Cochain w;
        w.degree = 1;
        w.dim = 2;
        w.v.assign(static_cast<std::size_t>(G.n) * 2, 0);
        for (unsigned g = 0; g < G.n; ++g) {
            w.v[g * 2] = mod_pos(t.v[g], p);
            w.v[g * 2 + 1] = mod_pos(u.v[g], p);
        }
        return w;
    };
    Cochain t_x;
    t_x.degree = 1;
    t_x.dim = 1;
    t_x.v.resize(G.n);
    for (unsigned g = 0; g < G.n; ++g) t_x.v[g] = mod_pos(half * x.v[g] * (x.v[g] - 1), p);

    Cochain wx = lift(t_x, x), wy = lift(t_y, y);
    Cochain lhs = cup(G, Vx, x, wy);  // x cup w_y
    // w_x cup y pairs C^1(V_x) x C^1(F_p) -> C^2(V_x):
    // (w cup y)(g,h) = w(g) * y(h), no action on the scalar right factor.
    Cochain wxy;
    wxy.degree = 2;
    wxy.dim = 2;
    wxy.v.assign(static_cast<std::size_t>(G.n) * G.n * 2, 0);
    for (unsigned g = 0; g < G.n; ++g)
        for (unsigned h = 0; h < G.n; ++h)
            for (unsigned i = 0; i < 2; ++i)
                wxy.v[(static_cast<std::size_t>(g) * G.n + h) * 2 + i] =
                    mod_pos(wx.v[g * 2 + i] * y.v[h], p);

    // difference = x cup w_y - w_x cup y - (1/2) x cup w_y
    Cochain diff;
    diff.degree = 2;
    diff.dim = 2;
    diff.v.resize(lhs.v.size());
    for (std::size_t i = 0; i < lhs.v.size(); ++i)
        diff.v[i] = mod_pos(lhs.v[i] - wxy.v[i] - half * lhs.v[i], p);

    Cochain w;
    w.degree = 1;
    w.dim = 2;
    w.v.assign(static_cast<std::size_t>(G.n) * 2, 0);
    for (unsigned g = 0; g < G.n; ++g) {
        w.v[g * 2] = mod_pos(-half * t_y.v[g], p);
        w.v[g * 2 + 1] = mod_pos(half * t_y.v[g], p);
    }
    Cochain dw = coboundary(G, Vx, w);
    for (std::size_t i = 0; i < dw.v.size(); ++i)
        if (mod_pos(dw.v[i] - diff.v[i], p) != 0)
            throw std::logic_error("half_cup_witness: pointwise verification failed");
    return w;
}

Cochain bockstein(const FiniteGroupTable& G, const mpz_class& p, const Cochain& x) {
    Coefficients M = Coefficients::trivial(G, p);
    if (!is_cocycle(G, M, x)) throw std::invalid_argument("bockstein: x must be a 1-cocycle");
    Cochain out;
    out.degree = 2;
    out.dim = 1;
    out.v.assign(static_cast<std::size_t>(G.n) * G.n, 0);
    for (unsigned g = 0; g < G.n; ++g)
        for (unsigned h = 0; h < G.n; ++h) {
            mpz_class lift = mod_pos(x.v[g], p) + mod_pos(x.v[h], p) - mod_pos(x.v[G.mul[g][h]], p);
            out.v[static_cast<std::size_t>(g) * G.n + h] = mod_pos(lift / p, p);
        }
    return out;
}

}  // namespace cft::gcoh
