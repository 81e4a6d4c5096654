#pragma once
// Imaginary quadratic fields K = Q(sqrt(D)) in the binary-quadratic-form
// model: class group by exhaustive reduced-form enumeration, discrete logs,
// characters mod p, and the (a', J) classes with (a') = J^{-p}.

#include "cftower/exact/int_matrix.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

namespace cft::quad {

bool is_fundamental_discriminant(const mpz_class& D);

struct QuadForm {
    mpz_class a, b, c;
    bool operator==(const QuadForm& o) const { return a == o.a && b == o.b && c == o.c; }
    bool operator<(const QuadForm& o) const {
        if (a != o.a) return a < o.a;
        if (b != o.b) return b < o.b;
        return c < o.c;
    }
    mpz_class disc() const { return b * b - 4 * a * c; }
};

QuadForm principal_form(const mpz_class& D);
QuadForm reduce(QuadForm f);
QuadForm compose(const QuadForm& f, const QuadForm& g);  // reduced composite
QuadForm form_inverse(const QuadForm& f);
QuadForm form_pow(const QuadForm& f, const mpz_class& e);
bool is_reduced(const QuadForm& f);

// All reduced forms of discriminant D < 0.
std::vector<QuadForm> enumerate_reduced_forms(const mpz_class& D);

// Elements of K as u + v*w with w = (D + sqrt(D))/2 (so O_K = Z[w]).
struct QuadElem {
    mpq_class u, v;
};
QuadElem qe_mul(const QuadElem& x, const QuadElem& y, const mpz_class& D);
QuadElem qe_conj(const QuadElem& x, const mpz_class& D);
QuadElem qe_inverse(const QuadElem& x, const mpz_class& D);
mpq_class qe_norm(const QuadElem& x, const mpz_class& D);

// Fractional ideal of O_K: row lattice of `basis` (coordinates in [1, w])
// scaled by 1/den.  Canonical: basis in HNF, gcd(den, content) = 1.
struct QuadIdeal {
    mpz_class D;
    exact::IntMatrix basis;  // 2x2 HNF
    mpz_class den;

    bool operator==(const QuadIdeal& o) const {
        return D == o.D && den == o.den && basis == o.basis;
    }
};

QuadIdeal unit_ideal(const mpz_class& D);
QuadIdeal ideal_from_lattice(const mpz_class& D, const exact::IntMatrix& rows, const mpz_class& den);
QuadIdeal ideal_mul(const QuadIdeal& I, const QuadIdeal& J);
QuadIdeal ideal_inverse(const QuadIdeal& I);
QuadIdeal ideal_pow(const QuadIdeal& I, const mpz_class& e);
QuadIdeal principal_ideal(const mpz_class& D, const QuadElem& x);
QuadIdeal ideal_conj(const QuadIdeal& I);
mpq_class ideal_norm(const QuadIdeal& I);
bool ideal_contains(const QuadIdeal& I, const QuadElem& x);

// If I is principal, a generator (unique up to sign for D < -4).
std::optional<QuadElem> principal_generator(const QuadIdeal& I);

struct FormWrongDiscriminant : std::runtime_error {
    FormWrongDiscriminant() : std::runtime_error("form discriminant does not match group") {}
};
struct NoPTorsion : std::runtime_error {
    NoPTorsion() : std::runtime_error("class group has no p-torsion") {}
};

class ClassGroupQF {
public:
    explicit ClassGroupQF(const mpz_class& D);

    const mpz_class& discriminant() const { return D_; }
    const mpz_class& order() const { return h_; }
    const std::vector<mpz_class>& invariant_factors() const { return inv_; }
    const std::vector<QuadForm>& generators() const { return gens_; }
    const std::vector<QuadForm>& all_forms() const { return forms_; }

    // Exponents e (mod invariant factors) with prod gens[i]^e[i] = [f].
    std::vector<mpz_class> class_log(const QuadForm& f) const;
    std::vector<mpz_class> class_log(const QuadIdeal& I) const;

    std::size_t p_rank(const mpz_class& p) const;

private:
    mpz_class D_, h_;
    std::vector<QuadForm> forms_;
    std::vector<QuadForm> gens_;        // canonical generators, order = inv_[i]
    std::vector<mpz_class> inv_;        // invariant factors > 1
    std::map<QuadForm, std::vector<mpz_class>> dlog_;
};

// Correspondence between (classes of) ideals and forms.
QuadForm form_of_ideal(const QuadIdeal& I);
QuadIdeal ideal_of_form(const QuadForm& f);

struct CharacterModP {
    mpz_class p;
    std::vector<mpz_class> values_on_generators;  // in Z/p, one per generator

    mpz_class eval(const ClassGroupQF& G, const QuadForm& f) const;
    mpz_class eval(const ClassGroupQF& G, const QuadIdeal& I) const;
};

// A basis of Hom(Cl(K)/p, Z/p) dual to the p-torsion basis order.
std::vector<CharacterModP> character_basis(const ClassGroupQF& G, const mpz_class& p);

struct MuPClass {
    QuadElem a_prime;  // generator with (a') = J^{-p}
    QuadIdeal J;       // p-torsion ideal
    QuadForm j_form;   // reduced form of the class of J
};

// One MuPClass per F_p-basis vector of Cl(K)[p].
std::vector<MuPClass> mu_p_basis(const ClassGroupQF& G, const mpz_class& p);

}  // namespace cft::quad
