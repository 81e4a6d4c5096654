#include "cftower/res/resolution.hpp"

#include <random>

#include "doctest.h"

using namespace cft::res;
using GR = GroupRingElement;

namespace {

GR rand_elem(unsigned p, std::mt19937_64& rng) {
    GR e(p);
    std::uniform_int_distribution<long> pick(-9, 9);
    for (auto& t : e.c) t = pick(rng);
    return e;
}

}  // namespace

TEST_CASE("group ring arithmetic") {
    for (unsigned p : {3u, 5u, 7u}) {
        GR one = GR::scalar(p, 1);
        // (1 - T_y) Gamma_y = p - Delta_y; same relation in x.
        CHECK((one - GR::Ty(p)) * GR::Gamma_y(p) ==
              GR::scalar(p, mpz_class(p)) - GR::Delta_y(p));
        CHECK((one - GR::Tx(p)) * GR::Gamma_x(p) ==
              GR::scalar(p, mpz_class(p)) - GR::Delta_x(p));
        // Augmentation of the trace element.
        CHECK(GR::Delta_x(p).eps() == p);
        CHECK(GR::Delta_x(p).eps_x() == GR::scalar(p, mpz_class(p)));
        // T^p = 1.
        GR tx = GR::Tx(p), acc = one;
        for (unsigned i = 0; i < p; ++i) acc = acc * tx;
        CHECK(acc == one);

        std::mt19937_64 rng(p);
        for (int t = 0; t < 20; ++t) {
            GR a = rand_elem(p, rng), b = rand_elem(p, rng), c = rand_elem(p, rng);
            CHECK(a * b == b * a);
            CHECK((a * b) * c == a * (b * c));
            CHECK(a * (b + c) == a * b + a * c);
            // eps is a ring homomorphism; the partial augmentations are too.
            CHECK((a * b).eps() == a.eps() * b.eps());
            CHECK((a * b).eps_x() == a.eps_x() * b.eps_x());
        }
    }
}

TEST_CASE("quotient blocks") {
    for (unsigned p : {3u, 5u}) {
        CHECK(block_dim(Block::QGy, p) == 2);
        CHECK(block_dim(Block::QGxy, p) == 4);
        GR one = GR::scalar(p, 1), ty = GR::Ty(p);
        // p = 0 and (1-T_y)^2 = 0 in F_p[G_y]/I_y^2.
        CHECK(block_reduce(Block::QGy, GR::scalar(p, mpz_class(p))).is_zero());
        CHECK(block_reduce(Block::QGy, (one - ty) * (one - ty)).is_zero());
        // {1 - sigma_y, sigma_y^{p-1}} is a basis: the coordinate vectors are
        // independent mod p.
        auto u = block_coords(Block::QGy, one - ty);
        auto v = block_coords(Block::QGy, GR::monomial(p, 0, p - 1));
        mpz_class det = u[0] * v[1] - u[1] * v[0];
        CHECK(det % p != 0);
        // (1-T_x)^2, (1-T_y)^2 and p all die in F_p[G_x x G_y]/(I_x^2+I_y^2).
        GR tx = GR::Tx(p);
        CHECK(block_reduce(Block::QGxy, (one - tx) * (one - tx)).is_zero());
        CHECK(block_reduce(Block::QGxy, (one - ty) * (one - ty)).is_zero());
        CHECK_FALSE(block_reduce(Block::QGxy, (one - tx) * (one - ty)).is_zero());
    }
}

TEST_CASE("build_ladder expands the displayed entries") {
    ChainMapLadder L = build_ladder(3);
    // delta^{1,-2} = (T_y - 1; p - Delta_y) with explicit coefficients.
    GR e0 = L.del_1_m2.at(0, 0).coef;
    CHECK(e0.at(0, 1) == 1);
    CHECK(e0.at(0, 0) == -1);
    CHECK(e0.at(0, 2) == 0);
    GR e1 = L.del_1_m2.at(1, 0).coef;
    CHECK(e1.at(0, 0) == 2);  // p - 1
    CHECK(e1.at(0, 1) == -1);
    CHECK(e1.at(0, 2) == -1);
    // Shapes match the displays.
    CHECK(L.del_m1_m2.src.size() == 5);
    CHECK(L.del_m1_m2.dst.size() == 3);
    CHECK(L.cone_m3.dst.size() == 6);
    CHECK(L.cone_m2.dst.size() == 4);
    CHECK(L.cone_m1.dst == std::vector<Block>{Block::ZGy, Block::ZGx, Block::ZGxy});
    CHECK(L.del_1_m1.dst == std::vector<Block>{Block::Z, Block::ZGy});
    CHECK(L.q_m1.dst.size() == 2);
    CHECK(L.fdel_0_m2.src.size() == 5);
}

TEST_CASE("verify_complex passes for p = 3, 5, 7") {
    for (unsigned p : {3u, 5u, 7u}) {
        ChainMapLadder L = build_ladder(p);
        Report r = verify_complex(L);
        for (const auto& c : r.checks) {
            INFO(c.name << " " << c.detail);
            CHECK(c.pass);
        }
        CHECK(r.all_pass);
        CHECK_NOTHROW(require_complex(L));
    }
}

TEST_CASE("corrupted sign is caught and named") {
    ChainMapLadder L = build_ladder(3);
    // Flip the sign of the -p entry of C(alpha)^{-2}.
    L.cone_m2.at(0, 1).coef = -L.cone_m2.at(0, 1).coef;
    Report r = verify_complex(L);
    CHECK_FALSE(r.all_pass);
    const CheckResult* c = r.find("cone: C(alpha)^{-2} o C(alpha)^{-3} = 0");
    REQUIRE(c != nullptr);
    CHECK_FALSE(c->pass);
    CHECK_THROWS_AS(require_complex(L), IdentityFailed);
}

TEST_CASE("mod-p exactness bookkeeping") {
    for (unsigned p : {3u, 5u, 7u}) {
        ChainMapLadder L = build_ladder(p);
        Report r = verify_exactness_modp(L);
        for (const auto& c : r.checks) {
            INFO(c.name << " " << c.detail);
            CHECK(c.pass);
        }
        CHECK(r.all_pass);
        CHECK_NOTHROW(require_exactness_modp(L));
        // The spec'd truncation pattern: exact next to the augmentation,
        // module-dimension homology at the truncated ends.
        CHECK(r.find("free node(0,0)")->detail.find("homology 0") != std::string::npos);
        CHECK(r.find("node(1,-1)")->detail.find("homology 2") != std::string::npos);
        CHECK(r.find("node(0,-1)")->detail.find("homology 4") != std::string::npos);
    }
}
