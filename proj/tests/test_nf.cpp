#include <algorithm>
#include <random>

#include "cftower/nf/class_group.hpp"
#include "cftower/nf/ideal.hpp"
#include "cftower/nf/lll.hpp"
#include "cftower/nf/order.hpp"
#include "cftower/quad/quadclass.hpp"
#include "doctest.h"

using namespace cft;
using namespace cft::nf;

namespace {

exact::ZPoly zp(std::initializer_list<long> cs) {
    exact::ZPoly f;
    for (long c : cs) f.emplace_back(c);
    return exact::zpoly_trim(std::move(f));
}

NfElem random_elem(const NumberFieldOrder& O, std::mt19937_64& rng, long spread = 5) {
    NfElem e = O.zero();
    for (auto& c : e.num) c = static_cast<long>(rng() % (2 * spread + 1)) - spread;
    return e;
}

exact::ZPoly quad_poly(const mpz_class& D) {
    // Minimal polynomial of (D + sqrt(D))/2: t^2 - D t + (D^2 - D)/4.
    exact::ZPoly f(3);
    f[2] = 1;
    f[1] = -D;
    f[0] = (D * D - D) / 4;
    return f;
}

}  // namespace

TEST_CASE("maximal order: Gaussian integers") {
    auto O = maximal_order(zp({1, 0, 1}));
    CHECK(O.discriminant() == -4);
    CHECK(O.index() == 1);
    CHECK(O.degree() == 2);
}

TEST_CASE("maximal order: t^3 - t - 1 has discriminant -23 and power basis") {
    auto O = maximal_order(zp({-1, -1, 0, 1}));
    CHECK(O.discriminant() == -23);
    CHECK(O.index() == 1);
}

TEST_CASE("maximal order: t^2 - 5 picks up the index-2 enlargement") {
    auto O = maximal_order(zp({-5, 0, 1}));
    CHECK(O.discriminant() == 5);
    CHECK(O.index() == 2);
    // (1+sqrt 5)/2 must be in the order.
    std::vector<mpq_class> c{mpq_class(1, 2), mpq_class(1, 2)};
    NfElem w = O.from_power_basis(c);
    CHECK(w.den == 1);
}

TEST_CASE("maximal order rejects certified-reducible input") {
    CHECK_THROWS_AS(maximal_order(zp({1, 2, 1})), ReduciblePolynomial);
}

TEST_CASE("element arithmetic agrees with the defining relation") {
    auto O = maximal_order(zp({-1, -1, 0, 1}));
    NfElem t = O.theta();
    // t^3 = t + 1.
    CHECK(O.eq(O.pow(t, 3), O.add(t, O.one())));
    CHECK(O.norm(t) == 1);  // N(theta) = -f(0) for odd degree, here 1
    std::mt19937_64 rng(5);
    for (int i = 0; i < 25; ++i) {
        NfElem a = random_elem(O, rng), b = random_elem(O, rng);
        CHECK(O.norm(O.mul(a, b)) == O.norm(a) * O.norm(b));
        if (!O.is_zero(a)) CHECK(O.eq(O.mul(a, O.inverse(a)), O.one()));
    }
}

TEST_CASE("factor_prime patterns in Q(i)") {
    auto O = maximal_order(zp({1, 0, 1}));
    auto f5 = factor_prime(O, 5);
    REQUIRE(f5.size() == 2);
    CHECK(f5[0].e == 1);
    CHECK(f5[0].f == 1);
    CHECK(f5[1].e == 1);
    CHECK(f5[1].f == 1);
    auto f2 = factor_prime(O, 2);
    REQUIRE(f2.size() == 1);
    CHECK(f2[0].e == 2);
    CHECK(f2[0].f == 1);
    auto f3 = factor_prime(O, 3);  // inert
    REQUIRE(f3.size() == 1);
    CHECK(f3[0].e == 1);
    CHECK(f3[0].f == 2);
}

TEST_CASE("factor_prime at the ramified prime of t^3 - t - 1") {
    auto O = maximal_order(zp({-1, -1, 0, 1}));
    auto fs = factor_prime(O, 23);
    std::vector<std::pair<unsigned, unsigned>> ef;
    for (const auto& s : fs) ef.emplace_back(s.e, s.f);
    std::sort(ef.begin(), ef.end());
    REQUIRE(ef.size() == 2);
    CHECK(ef[0] == std::pair<unsigned, unsigned>{1, 1});
    CHECK(ef[1] == std::pair<unsigned, unsigned>{2, 1});
}

TEST_CASE("factor_prime residue degrees sum correctly on random primes") {
    auto O = maximal_order(zp({-1, -1, 0, 1}));
    mpz_class q = 1;
    for (int i = 0; i < 20; ++i) {
        mpz_nextprime(q.get_mpz_t(), q.get_mpz_t());
        unsigned total = 0;
        for (const auto& s : factor_prime(O, q)) total += s.e * s.f;
        CHECK(total == O.degree());
    }
}

TEST_CASE("ideal arithmetic: inverses, norms, sums") {
    auto O = maximal_order(zp({-1, -1, 0, 1}));
    std::mt19937_64 rng(11);
    int done = 0;
    for (int i = 0; i < 40 && done < 25; ++i) {
        NfElem a = random_elem(O, rng), b = random_elem(O, rng);
        if (O.is_zero(a) || O.is_zero(b)) continue;
        FracIdeal A = fi_from_elem(O, a), B = fi_from_elem(O, b);
        FracIdeal AB = fi_mul(O, A, B);
        CHECK(fi_norm(O, AB) == fi_norm(O, A) * fi_norm(O, B));
        CHECK(fi_eq(fi_mul(O, A, fi_inv(O, A)), fi_unit(O)));
        CHECK(fi_contains(fi_add(O, A, B), A));
        CHECK(fi_contains(A, AB));
        ++done;
    }
    CHECK(done == 25);
    // N(qO) = q^n for an inert prime: t^3 - t - 1 is irreducible mod 2.
    FracIdeal two = fi_from_elem(O, O.from_int(2));
    CHECK(fi_norm(O, two) == mpq_class(8));
    auto f2 = factor_prime(O, 2);
    REQUIRE(f2.size() == 1);
    CHECK(f2[0].f == 3);
}

TEST_CASE("valuations recover exponents of ideal products") {
    auto O = maximal_order(zp({1, 0, 1}));
    auto f5 = factor_prime(O, 5);
    FracIdeal P{f5[0].hnf, 1}, Q{f5[1].hnf, 1};
    FracIdeal I = fi_mul(O, fi_pow(O, P, 3), Q);
    CHECK(fi_valuation(O, P, I) == 3);
    CHECK(fi_valuation(O, Q, I) == 1);
    CHECK(fi_valuation(O, P, fi_inv(O, I)) == -3);
}

TEST_CASE("short_ideal_elements returns genuine short ideal members") {
    auto O = maximal_order(zp({-1, -1, 0, 1}));
    FracIdeal I = fi_from_elem(O, O.from_int(6));
    for (const auto& e : short_ideal_elements(O, I)) {
        CHECK(fi_contains_elem(O, I, e));
        CHECK(!O.is_zero(e));
    }
}

TEST_CASE("class group: Q(i) trivial") {
    auto O = maximal_order(zp({1, 0, 1}));
    auto cg = class_group_nf(O);
    CHECK(cg.h == 1);
    CHECK(cg.invariants.empty());
    CHECK(cg.generation_certified);
}

TEST_CASE("class group: t^2 + 23 subfield case has order 3") {
    auto O = maximal_order(quad_poly(-23));
    CHECK(O.discriminant() == -23);
    auto cg = class_group_nf(O);
    CHECK(cg.h == 3);
    REQUIRE(cg.invariants.size() == 1);
    CHECK(cg.invariants[0] == 3);
}

TEST_CASE("is_principal: certified generators and nonprincipal detection") {
    auto O = maximal_order(quad_poly(-23));
    auto cg = class_group_nf(O);

    auto unit = is_principal(cg, fi_unit(O));
    CHECK(unit.principal);
    CHECK(O.eq(unit.generator, O.one()));

    FracIdeal seven = fi_from_elem(O, O.from_int(7));
    auto r7 = is_principal(cg, seven);
    CHECK(r7.principal);
    CHECK(fi_eq(fi_from_elem(O, r7.generator), seven));

    auto f2 = factor_prime(O, 2);
    REQUIRE(f2.size() == 2);  // 2 splits for D = -23
    FracIdeal P{f2[0].hnf, 1};
    auto rp = is_principal(cg, P);
    CHECK(!rp.principal);
    bool nonzero = false;
    for (const auto& c : rp.class_exponents)
        if (c != 0) nonzero = true;
    CHECK(nonzero);
    // P^3 is principal (h = 3).
    auto rp3 = is_principal(cg, fi_pow(O, P, 3));
    CHECK(rp3.principal);
    CHECK(fi_eq(fi_from_elem(O, rp3.generator), fi_pow(O, P, 3)));
}

TEST_CASE("class_group_nf matches the quadratic-form enumeration on 50 fields") {
    int checked = 0;
    for (mpz_class D = -3; D > -400 && checked < 50; --D) {
        if (!quad::is_fundamental_discriminant(D)) continue;
        auto O = maximal_order(quad_poly(D));
        REQUIRE(O.discriminant() == D);
        BoundPolicy pol;
        pol.seed = static_cast<std::uint64_t>(checked + 1);
        auto cg = class_group_nf(O, pol);
        quad::ClassGroupQF G(D);
        CHECK(cg.h == G.order());
        std::vector<mpz_class> a = cg.invariants, b = G.invariant_factors();
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        CHECK(a == b);
        ++checked;
    }
    CHECK(checked == 50);
}
