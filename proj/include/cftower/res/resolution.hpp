#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <vector>

#include "cftower/exact/int_matrix.hpp"

namespace cft::res {

// Element of Z[T_x, T_y] / (T_x^p - 1, T_y^p - 1).  Coefficient of
// T_x^i T_y^j sits at c[i*p + j]; multiplication is cyclic convolution in
// both indices.
struct GroupRingElement {
    unsigned p = 0;
    std::vector<mpz_class> c;

    explicit GroupRingElement(unsigned pp = 0) : p(pp), c(std::size_t(pp) * pp) {}

    static GroupRingElement scalar(unsigned p, const mpz_class& n);
    static GroupRingElement monomial(unsigned p, unsigned i, unsigned j,
                                     const mpz_class& coef = 1);
    static GroupRingElement Tx(unsigned p) { return monomial(p, 1, 0); }
    static GroupRingElement Ty(unsigned p) { return monomial(p, 0, 1); }
    // Delta = sum T^n, Gamma = -sum n*T^n (so (1 - T) Gamma = p - Delta).
    static GroupRingElement Delta_x(unsigned p);
    static GroupRingElement Delta_y(unsigned p);
    static GroupRingElement Gamma_x(unsigned p);
    static GroupRingElement Gamma_y(unsigned p);

    bool is_zero() const;
    mpz_class& at(unsigned i, unsigned j) { return c[std::size_t(i) * p + j]; }
    const mpz_class& at(unsigned i, unsigned j) const { return c[std::size_t(i) * p + j]; }

    // Partial augmentations: eps_x sums out the T_x index (lands in Z[G_y]),
    // eps_y sums out T_y.  eps() is the full augmentation.
    GroupRingElement eps_x() const;
    GroupRingElement eps_y() const;
    mpz_class eps() const;

    friend GroupRingElement operator+(const GroupRingElement& a, const GroupRingElement& b);
    friend GroupRingElement operator-(const GroupRingElement& a, const GroupRingElement& b);
    friend GroupRingElement operator-(const GroupRingElement& a);
    friend GroupRingElement operator*(const GroupRingElement& a, const GroupRingElement& b);
    friend GroupRingElement operator*(const mpz_class& n, const GroupRingElement& a);
    friend bool operator==(const GroupRingElement& a, const GroupRingElement& b);
    friend bool operator!=(const GroupRingElement& a, const GroupRingElement& b);
};

// Block types of the modules appearing in the ladders.  QGy and QGxy are the
// F_p quotients F_p[G_y]/I_y^2 (dim 2) and F_p[G_x x G_y]/(I_x^2 + I_y^2)
// (dim 4); their elements are stored as canonical group-ring representatives.
enum class Block { Z, ZGx, ZGy, ZGxy, QGy, QGxy };

unsigned block_dim(Block b, unsigned p);
// F_p coordinates of an element of a block (length block_dim).
std::vector<mpz_class> block_coords(Block b, const GroupRingElement& e);
// Canonical representative of e in the block (reduces quotient blocks;
// asserts shape for the integral blocks).
GroupRingElement block_reduce(Block b, const GroupRingElement& e);
// Monomial basis used to enumerate a block.
std::vector<GroupRingElement> block_basis(Block b, unsigned p);

// A matrix entry: v -> coef * eps(v) where eps applies the flagged partial
// augmentations first.  Covers every entry of the displays (ring elements,
// eps_x, eps_y, (1-T_y) eps_x, eps_y eps_x).
struct Entry {
    GroupRingElement coef;
    bool ex = false;
    bool ey = false;
};

struct Morphism {
    std::string name;
    unsigned p = 0;
    std::vector<Block> dst, src;
    std::vector<Entry> e;  // dst.size() x src.size(), row-major

    Entry& at(std::size_t r, std::size_t s) { return e[r * src.size() + s]; }
    const Entry& at(std::size_t r, std::size_t s) const { return e[r * src.size() + s]; }

    std::vector<GroupRingElement> apply(const std::vector<GroupRingElement>& v) const;
    // F_p-linear flattening: (sum dst dims) x (sum src dims) integer matrix.
    exact::IntMatrix flatten() const;
};

struct IdentityFailed : std::runtime_error {
    explicit IdentityFailed(const std::string& cell)
        : std::runtime_error("chain identity failed at " + cell) {}
};
struct ExactnessFailed : std::runtime_error {
    ExactnessFailed(const std::string& node, long deficit)
        : std::runtime_error("exactness failed at " + node + " (homology dim " +
                             std::to_string(deficit) + ")") {}
};

// Every matrix of the two resolution diagrams and the cone construction.
struct ChainMapLadder {
    unsigned p = 0;

    // Mixed-module diagram.
    Morphism del_m1_m2, del_0_m2, del_1_m2;   // delta^{-1,-2}, delta^{0,-2}, delta^{1,-2}
    Morphism del_m1_m1, del_0_m1, del_1_m1;   // middle verticals
    Morphism del_m1_0, del_0_0, del_1_0;      // augmentations into the quotients
    Morphism alpha_m1, beta_m1, alpha_0, beta_0;
    Morphism ses_inj, ses_eps;                // T_x - 1 and eps_x of the bottom row

    // Free diagram (fdel_1_* = fdel_m1_* by construction, kept separate).
    Morphism fdel_m1_m2, fdel_0_m2, fdel_1_m2;
    Morphism fdel_m1_m1, fdel_0_m1, fdel_1_m1;
    Morphism fdel_m1_0, fdel_0_0, fdel_1_0;
    Morphism falpha_m1, fbeta_m1, falpha_0, fbeta_0;

    // Quasi-isomorphism ladder from the left column onto the right column.
    Morphism qi_m2, qi_m1, qi_0;

    // Cone of the left inclusion, and the chain map q onto the right column.
    Morphism cone_m3, cone_m2, cone_m1;  // C(alpha)^{-3}, C(alpha)^{-2}, C(alpha)^{-1}
    Morphism q_m2, q_m1, q_0;
    Morphism pr_m2, pr_m1;               // projections of the cone onto the shifted left column
};

ChainMapLadder build_ladder(unsigned p);

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};
struct Report {
    std::vector<CheckResult> checks;
    bool all_pass = true;
    const CheckResult* find(const std::string& name) const;
};

// Zero compositions along every column, commuting squares in both diagrams,
// the quasi-isomorphism ladder squares, and the cone chain-map identities.
Report verify_complex(const ChainMapLadder& L);

// Mod-p rank bookkeeping at every interior node.  Nodes where the displayed
// (truncated) complex honestly carries homology record the expected dimension
// of the resolved module instead of 0.
Report verify_exactness_modp(const ChainMapLadder& L);

// Throwing wrappers used by the CLI.
void require_complex(const ChainMapLadder& L);
void require_exactness_modp(const ChainMapLadder& L);

}  // namespace cft::res
