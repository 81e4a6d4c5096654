#include "cftower/tower/classify.hpp"

namespace cft::tower {

using exact::QPoly;

QPoly zassenhaus_polynomial(int i, int j) {
    if (i < 3 || j < i) throw std::invalid_argument("zassenhaus_polynomial: need 3 <= i <= j");
    QPoly f(static_cast<std::size_t>(j) + 1, mpq_class(0));
    f[0] = 1;
    f[1] = -2;
    f[i] += 1;
    f[j] += 1;
    return exact::qpoly_trim(std::move(f));
}

bool gs_positive(int d, const std::vector<int>& depths) {
    int maxk = 1;
    for (int k : depths) {
        if (k < 2) throw std::invalid_argument("gs_positive: relation depth < 2");
        maxk = std::max(maxk, k);
    }
    QPoly f(static_cast<std::size_t>(maxk) + 1, mpq_class(0));
    f[0] = 1;
    f[1] -= d;
    for (int k : depths) f[k] += 1;
    f = exact::qpoly_trim(std::move(f));
    if (exact::qpoly_eval(f, mpq_class(1, 2)) <= 0) return false;
    if (exact::qpoly_eval(f, 1) < 0) return false;
    return exact::count_roots_open_unit_interval(f) == 0;
}

std::set<std::pair<int, int>> admissible_types(int j_max) {
    // Relation depths are odd for these Galois groups (Koch-Venkov), so only
    // odd (i, j) are candidate Zassenhaus types.
    std::set<std::pair<int, int>> out;
    for (int i = 3; i <= j_max; i += 2)
        for (int j = i; j <= j_max; j += 2)
            if (gs_positive(2, {i, j})) out.insert({i, j});
    return out;
}

std::size_t p_rank_of(const mpz_class& p, const std::vector<mpz_class>& invariant_factors) {
    std::size_t r = 0;
    for (const auto& f : invariant_factors)
        if (f == 0 || f % p == 0) ++r;
    return r;
}

Classification classify(const mpz_class& p, const std::vector<mpz_class>& invariant_factors,
                        const std::optional<exact::IntMatrix>& zm) {
    std::size_t rank = p_rank_of(p, invariant_factors);
    if (rank == 0) return {Verdict::LengthZero, "trivial-p-class-group", std::nullopt, false, ""};
    if (rank == 1)
        return {Verdict::LengthOne, "cyclic-p-class-group-principalizes", std::nullopt, false, ""};
    if (rank >= 3)
        return {Verdict::Infinite, "rank3-golod-shafarevich", std::nullopt, false,
                "d >= 3 forces a GS violation for every admissible relation profile"};

    // rank == 2: the Zassenhaus matrix decides among the admissible types.
    if (!zm) throw MatrixMissing();
    std::size_t zr = exact::fp_rank(*zm, p);
    if (zr == 2)
        return {Verdict::GSInconclusive, "zm-rank2-type-(3,3)",
                std::set<std::pair<int, int>>{{3, 3}}, false,
                "both relations at depth 3; GS positivity holds"};
    if (zr == 1)
        return {Verdict::GSInconclusive, "zm-rank1-deep-relation-disjunction",
                std::set<std::pair<int, int>>{{3, 5}, {3, 7}}, true,
                "one relation deeper than 3: type (3,5), (3,7), or a GS-violating profile"};

    // zr == 0: both relations have depth >= 4, beyond every admissible type.
    if (p == 3) {
        bool nine_both = true;
        std::size_t counted = 0;
        for (const auto& f : invariant_factors)
            if (f == 0 || f % 3 == 0) {
                ++counted;
                if (f != 0 && f % 9 != 0) nine_both = false;
            }
        (void)counted;
        if (!nine_both)
            return {Verdict::GSInconclusive, "zm-zero-p3-nine-condition-unmet",
                    std::set<std::pair<int, int>>{}, true,
                    "p=3 needs 9 | both invariant factors to push both depths past 3"};
        return {Verdict::Infinite, "zm-zero-deep-relations-p3-nine-divides", std::nullopt, false,
                "vanishing matrix and 9 | both factors: no admissible type survives"};
    }
    return {Verdict::Infinite, "zm-zero-deep-relations", std::nullopt, false,
            "vanishing matrix: both relation depths exceed every admissible type"};
}

}  // namespace cft::tower
