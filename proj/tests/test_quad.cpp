#include <doctest.h>

#include "cftower/quad/quadclass.hpp"

#include <random>

using namespace cft;
using namespace cft::quad;

TEST_CASE("fundamental discriminant recognition") {
    CHECK(is_fundamental_discriminant(-3));
    CHECK(is_fundamental_discriminant(-4));
    CHECK(is_fundamental_discriminant(-7));
    CHECK(is_fundamental_discriminant(-8));
    CHECK(is_fundamental_discriminant(-23));
    CHECK(is_fundamental_discriminant(-90868));
    CHECK(is_fundamental_discriminant(-3826859));
    CHECK_FALSE(is_fundamental_discriminant(-9));
    CHECK_FALSE(is_fundamental_discriminant(-12));
    CHECK_FALSE(is_fundamental_discriminant(-5));  // -5 = 3 mod 4
    CHECK_FALSE(is_fundamental_discriminant(5));
}

TEST_CASE("reduced form enumeration for small discriminants") {
    CHECK(enumerate_reduced_forms(-3).size() == 1);
    CHECK(enumerate_reduced_forms(-4).size() == 1);
    CHECK(enumerate_reduced_forms(-23).size() == 3);   // h(-23) = 3
    CHECK(enumerate_reduced_forms(-47).size() == 5);   // h(-47) = 5
    CHECK(enumerate_reduced_forms(-163).size() == 1);  // h(-163) = 1
    for (const auto& f : enumerate_reduced_forms(-23)) {
        CHECK(is_reduced(f));
        CHECK(f.disc() == -23);
    }
}

TEST_CASE("composition group axioms") {
    mpz_class D = -47;
    auto forms = enumerate_reduced_forms(D);
    QuadForm id = principal_form(D);
    std::mt19937 rng(31);
    std::uniform_int_distribution<std::size_t> pick(0, forms.size() - 1);
    for (int t = 0; t < 200; ++t) {
        QuadForm f = forms[pick(rng)], g = forms[pick(rng)], h = forms[pick(rng)];
        CHECK(compose(f, g) == compose(g, f));
        CHECK(compose(compose(f, g), h) == compose(f, compose(g, h)));
        CHECK(compose(f, id) == f);
        CHECK(compose(f, form_inverse(f)) == id);
    }
}

TEST_CASE("class group structures") {
    ClassGroupQF g3(-3);
    CHECK(g3.order() == 1);
    CHECK(g3.invariant_factors().empty());

    ClassGroupQF g23(-23);
    CHECK(g23.order() == 3);
    REQUIRE(g23.invariant_factors().size() == 1);
    CHECK(g23.invariant_factors()[0] == 3);
    CHECK(g23.p_rank(3) == 1);

    // D = -21 = disc of Q(sqrt(-21))? -21 = 3 mod 4 -> not fundamental; use -84.
    // Cl(-84) = (Z/2)^2.
    ClassGroupQF g84(-84);
    CHECK(g84.order() == 4);
    REQUIRE(g84.invariant_factors().size() == 2);
    CHECK(g84.invariant_factors()[0] == 2);
    CHECK(g84.invariant_factors()[1] == 2);

    // First 3-rank-2 field: D = -3299, Cl = Z/3 x Z/9  (h = 27).
    ClassGroupQF g3299(-3299);
    CHECK(g3299.p_rank(3) == 2);
    CHECK(g3299.order() == 27);
}

TEST_CASE("paper flagship class groups") {
    ClassGroupQF g(-90868);
    CHECK(g.p_rank(5) == 2);
}

TEST_CASE("class_log basics") {
    ClassGroupQF g(-23);
    CHECK(g.class_log(principal_form(mpz_class(-23))) == std::vector<mpz_class>{0});
    auto gen = g.generators()[0];
    CHECK(g.class_log(gen) == std::vector<mpz_class>{1});
    CHECK(g.class_log(compose(gen, gen)) == std::vector<mpz_class>{2});
    CHECK_THROWS_AS(g.class_log(principal_form(mpz_class(-7))), FormWrongDiscriminant);
}

TEST_CASE("generator orders match invariant factors") {
    for (long d : {-23L, -47L, -84L, -455L, -3299L}) {
        ClassGroupQF g{mpz_class(d)};
        mpz_class prod = 1;
        for (std::size_t i = 0; i < g.invariant_factors().size(); ++i) {
            const auto& f = g.generators()[i];
            const auto& n = g.invariant_factors()[i];
            CHECK(form_pow(f, n) == principal_form(mpz_class(d)));
            // order is exactly n: no proper divisor kills it
            for (mpz_class q = 2; q * q <= n; ++q)
                if (n % q == 0) {
                    CHECK(form_pow(f, n / q) != principal_form(mpz_class(d)));
                }
            prod *= n;
        }
        CHECK(prod == g.order());
        if (g.invariant_factors().size() >= 2)
            for (std::size_t i = 0; i + 1 < g.invariant_factors().size(); ++i)
                CHECK(g.invariant_factors()[i + 1] % g.invariant_factors()[i] == 0);
    }
}

TEST_CASE("ideal arithmetic and the form bridge") {
    mpz_class D = -47;
    auto forms = enumerate_reduced_forms(D);
    for (const auto& f : forms) {
        CHECK(form_of_ideal(ideal_of_form(f)) == f);  // round trip on classes
    }
    // Ideal norm multiplicativity and inverse.
    std::mt19937 rng(7);
    std::uniform_int_distribution<std::size_t> pick(0, forms.size() - 1);
    for (int t = 0; t < 50; ++t) {
        QuadIdeal I = ideal_of_form(forms[pick(rng)]);
        QuadIdeal J = ideal_of_form(forms[pick(rng)]);
        CHECK(ideal_norm(ideal_mul(I, J)) == ideal_norm(I) * ideal_norm(J));
        CHECK(ideal_mul(I, ideal_inverse(I)) == unit_ideal(D));
    }
    // Unit ideal maps to the principal form.
    CHECK(form_of_ideal(unit_ideal(D)) == principal_form(D));
    // Prime above a split prime: form with a = q.
    // q = 2 splits in Q(sqrt(-47)) since -47 = 1 mod 8.
    QuadForm f2 = reduce({2, 1, 6});
    CHECK(f2.disc() == D);
    CHECK(f2.a == 2);
}

TEST_CASE("principal generator recovery") {
    mpz_class D = -23;
    // (7 + w) where w=(D+sqrt D)/2 ... take x = 2 + w.
    QuadElem x{mpq_class(2), mpq_class(1)};
    QuadIdeal I = principal_ideal(D, x);
    auto g = principal_generator(I);
    REQUIRE(g.has_value());
    CHECK(principal_ideal(D, *g) == I);
    // Non-principal ideal: generator absent.
    ClassGroupQF G(D);
    QuadForm nonprin = G.generators()[0];
    CHECK_FALSE(principal_generator(ideal_of_form(nonprin)).has_value());
}

TEST_CASE("mu_p basis for D=-23, p=3") {
    ClassGroupQF G(-23);
    auto basis = mu_p_basis(G, 3);
    REQUIRE(basis.size() == 1);
    const auto& m = basis[0];
    // (a') = J^{-3} exactly.
    CHECK(principal_ideal(mpz_class(-23), m.a_prime) ==
          ideal_inverse(ideal_pow(m.J, 3)));
    // [J] has order 3.
    CHECK(form_of_ideal(m.J) != principal_form(mpz_class(-23)));
    CHECK(form_pow(form_of_ideal(m.J), 3) == principal_form(mpz_class(-23)));
}

TEST_CASE("mu_p basis independence at rank 2") {
    ClassGroupQF G(-3299);
    auto basis = mu_p_basis(G, 3);
    REQUIRE(basis.size() == 2);
    // Independence via class_log: the two [J] classes generate (Z/3)^2 inside Cl[3].
    auto e1 = G.class_log(basis[0].J);
    auto e2 = G.class_log(basis[1].J);
    // Build 2x2 matrix of the mod-3 coordinates in the p-torsion quotient.
    exact::IntMatrix M(2, 2);
    std::size_t col = 0;
    const auto& inv = G.invariant_factors();
    for (std::size_t i = 0; i < inv.size() && col < 2; ++i) {
        if (inv[i] % 3 != 0) continue;
        // Cl[3] = directsum (d_i/3)Z/d_i; coordinate of a torsion class is e/(d_i/3).
        mpz_class step = inv[i] / 3;
        REQUIRE(e1[i] % step == 0);
        REQUIRE(e2[i] % step == 0);
        M(0, col) = e1[i] / step;
        M(1, col) = e2[i] / step;
        ++col;
    }
    CHECK(exact::fp_rank(M, 3) == 2);
    for (const auto& m : basis)
        CHECK(principal_ideal(mpz_class(-3299), m.a_prime) == ideal_inverse(ideal_pow(m.J, 3)));
}

TEST_CASE("character additivity on random ideal classes") {
    ClassGroupQF G(-3299);
    auto chars = character_basis(G, 3);
    REQUIRE(chars.size() == 2);
    auto forms = G.all_forms();
    std::mt19937 rng(99);
    std::uniform_int_distribution<std::size_t> pick(0, forms.size() - 1);
    for (int t = 0; t < 100; ++t) {
        QuadForm f = forms[pick(rng)], g = forms[pick(rng)];
        for (const auto& x : chars) {
            mpz_class lhs = x.eval(G, compose(f, g));
            mpz_class rhs = (x.eval(G, f) + x.eval(G, g)) % 3;
            CHECK(lhs == rhs);
        }
    }
}

TEST_CASE("errors") {
    ClassGroupQF g163(-163);  // h = 1
    CHECK_THROWS_AS(mu_p_basis(g163, 3), NoPTorsion);
    CHECK_THROWS(mu_p_basis(ClassGroupQF(-3), 3));
}
