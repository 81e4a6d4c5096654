#pragma once
// Golod-Shafarevich positivity, Zassenhaus type filtering, and the final
// p-class-field-tower classification rules.

#include "cftower/exact/int_matrix.hpp"
#include "cftower/exact/poly.hpp"

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace cft::tower {

struct PresentationProfile {
    int d = 0;                         // generator count of the pro-p group
    std::vector<int> relation_depths;  // Zassenhaus depths of the relations, each >= 2
};

enum class Verdict { LengthZero, LengthOne, Infinite, GSInconclusive };

struct Classification {
    Verdict verdict;
    std::string reason;  // stable citation tag for the rule applied
    // For GSInconclusive: the surviving Zassenhaus types.
    std::optional<std::set<std::pair<int, int>>> type_constraint;
    // Set when the honest verdict is "one of the listed types, or infinite".
    bool or_infinite = false;
    std::string note;
};

struct MatrixMissing : std::runtime_error {
    MatrixMissing() : std::runtime_error("rank-2 classification requires the Zassenhaus matrix") {}
};

// t^i + t^j - 2t + 1 (coalesces to 2t^i - 2t + 1 when i = j).
exact::QPoly zassenhaus_polynomial(int i, int j);

// Golod-Shafarevich test: true iff 1 - d t + sum_k t^{depth_k} stays positive
// on the open unit interval (no root there; endpoint and midpoint sanity
// checks included).  A finite pro-p group must satisfy this.
bool gs_positive(int d, const std::vector<int>& depths);

// All (i, j), 3 <= i <= j <= j_max, passing gs_positive with d = 2.
std::set<std::pair<int, int>> admissible_types(int j_max);

// Final classification.  `invariant_factors` are those of the full class
// group (nontrivial entries, divisibility chain).  `zm` is the 2x2 matrix of
// Massey pairing values mod p; required exactly when the p-rank is 2.
Classification classify(const mpz_class& p, const std::vector<mpz_class>& invariant_factors,
                        const std::optional<exact::IntMatrix>& zm);

// dim_{F_p} of Cl/p*Cl given invariant factors.
std::size_t p_rank_of(const mpz_class& p, const std::vector<mpz_class>& invariant_factors);

}  // namespace cft::tower
