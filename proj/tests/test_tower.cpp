#include <doctest.h>

#include "cftower/tower/classify.hpp"

using namespace cft;
using namespace cft::tower;

TEST_CASE("zassenhaus polynomial values") {
    auto f33 = zassenhaus_polynomial(3, 3);
    // 2t^3 - 2t + 1
    REQUIRE(exact::qpoly_deg(f33) == 3);
    CHECK(f33[3] == 2);
    CHECK(f33[1] == -2);
    CHECK(f33[0] == 1);
    auto f35 = zassenhaus_polynomial(3, 5);
    REQUIRE(exact::qpoly_deg(f35) == 5);
    CHECK(f35[5] == 1);
    CHECK(f35[3] == 1);
    CHECK(f35[1] == -2);
    CHECK(f35[0] == 1);
    auto f39 = zassenhaus_polynomial(3, 9);
    REQUIRE(exact::qpoly_deg(f39) == 9);
    CHECK(f39[9] == 1);
    CHECK(f39[3] == 1);
}

TEST_CASE("gs_positive on the known boundary cases") {
    CHECK(gs_positive(2, {3, 3}));
    CHECK(gs_positive(2, {3, 5}));
    CHECK(gs_positive(2, {3, 7}));
    CHECK_FALSE(gs_positive(2, {3, 9}));
    CHECK_FALSE(gs_positive(2, {5, 5}));
    CHECK_FALSE(gs_positive(2, {5, 7}));
    CHECK_FALSE(gs_positive(3, {3, 3, 3}));
}

TEST_CASE("admissible types") {
    std::set<std::pair<int, int>> expected{{3, 3}, {3, 5}, {3, 7}};
    CHECK(admissible_types(9) == expected);
    CHECK(admissible_types(15) == expected);
    CHECK(admissible_types(3) == std::set<std::pair<int, int>>{{3, 3}});
    // Monotonicity: growing the search window never adds types past 7.
    auto prev = admissible_types(7);
    for (int jm = 8; jm <= 15; ++jm) {
        auto cur = admissible_types(jm);
        CHECK(cur == prev);
        prev = cur;
    }
}

TEST_CASE("classification rules") {
    using IM = exact::IntMatrix;
    mpz_class p3 = 3;

    CHECK(classify(p3, {}, std::nullopt).verdict == Verdict::LengthZero);
    CHECK(classify(p3, {mpz_class(2)}, std::nullopt).verdict == Verdict::LengthZero);
    CHECK(classify(p3, {mpz_class(6)}, std::nullopt).verdict == Verdict::LengthOne);
    CHECK(classify(p3, {mpz_class(3), mpz_class(3), mpz_class(9)}, std::nullopt).verdict ==
          Verdict::Infinite);

    CHECK_THROWS_AS(classify(p3, {mpz_class(3), mpz_class(3)}, std::nullopt), MatrixMissing);

    IM full = IM::from_longs(2, 2, {1, 0, 0, 1});
    IM rank1 = IM::from_longs(2, 2, {1, 2, 2, 4});
    IM zero = IM::from_longs(2, 2, {0, 0, 0, 0});

    auto c2 = classify(p3, {mpz_class(3), mpz_class(3)}, full);
    CHECK(c2.verdict == Verdict::GSInconclusive);
    REQUIRE(c2.type_constraint.has_value());
    CHECK(*c2.type_constraint == std::set<std::pair<int, int>>{{3, 3}});
    CHECK_FALSE(c2.or_infinite);

    auto c1 = classify(p3, {mpz_class(3), mpz_class(3)}, rank1);
    CHECK(c1.verdict == Verdict::GSInconclusive);
    CHECK(*c1.type_constraint == std::set<std::pair<int, int>>{{3, 5}, {3, 7}});
    CHECK(c1.or_infinite);

    // p=3, vanishing matrix: Infinite only with 9 | both factors.
    auto c0a = classify(p3, {mpz_class(9), mpz_class(18)}, zero);
    CHECK(c0a.verdict == Verdict::Infinite);
    auto c0b = classify(p3, {mpz_class(3), mpz_class(9)}, zero);
    CHECK(c0b.verdict == Verdict::GSInconclusive);
    CHECK(c0b.or_infinite);

    // p=5: vanishing matrix is immediately conclusive.
    mpz_class p5 = 5;
    auto c0c = classify(p5, {mpz_class(5), mpz_class(5)}, zero);
    CHECK(c0c.verdict == Verdict::Infinite);

    // Verdicts always carry their rule tag.
    for (const auto& c : {c2, c1, c0a, c0b, c0c}) CHECK_FALSE(c.reason.empty());
}
