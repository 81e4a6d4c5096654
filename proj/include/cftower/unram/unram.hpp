#pragma once
// The unramified degree-p cyclic extension L_x/K attached to a mod-p ideal
// class character x: candidate fields (native binary-cubic enumeration for
// p = 3, provider records for p >= 5), compositum integral bases, the pinned
// generator sigma_x, and Frobenius evaluation by root matching.

#include "cftower/nf/ideal.hpp"
#include "cftower/quad/quadclass.hpp"

namespace cft::unram {

using exact::IntMatrix;
using exact::ZPoly;
using nf::NfElem;
using nf::NumberFieldOrder;

struct NoProviderData : std::runtime_error {
    explicit NoProviderData(const std::string& m) : std::runtime_error(m) {}
};
struct KernelMismatch : std::runtime_error {
    explicit KernelMismatch(const std::string& m) : std::runtime_error(m) {}
};
struct ProviderParseError : std::runtime_error {
    ProviderParseError(std::size_t line, const std::string& m)
        : std::runtime_error("provider line " + std::to_string(line) + ": " + m), line_no(line) {}
    std::size_t line_no;
};
struct DegeneratePrime : std::runtime_error {
    explicit DegeneratePrime(const std::string& m) : std::runtime_error(m) {}
};

// One polynomial per isomorphism class of cubic field with field discriminant
// exactly D (fundamental, < 0), canonically normalized (t^3 + q t + r with
// r < 0, minimal (index, |q|, |r|) generator).  The count is checked against
// (3^rank - 1)/2 from the 3-rank of Cl(D).
std::vector<ZPoly> cubic_fields_of_discriminant(const mpz_class& D);

// External data path for p >= 5: `p D c_0 c_1 ... c_n` per line, monic,
// degree p or 2p.  Blank lines and lines starting with '#' are ignored; any
// other malformed line raises ProviderParseError with its line number.
struct ExtensionProviderRecord {
    mpz_class p;
    mpz_class D;
    ZPoly poly;
};
std::vector<ExtensionProviderRecord> parse_provider_text(const std::string& text);
std::vector<ExtensionProviderRecord> parse_provider_file(const std::string& path);

struct UnramifiedExtension {
    mpz_class D;
    mpz_class p;
    NumberFieldOrder L;           // maximal order of L_x, degree 2p over Q
    IntMatrix sigma;              // sigma_x on the integral basis (row action)
    quad::CharacterModP character;
    NfElem omega;                 // image of w = (D + sqrt(D))/2, so O_K = Z[omega]
    NfElem gen;                   // generator of L used for Frobenius root matching
    ZPoly subfield_poly;          // degree-p polynomial of the non-Galois subfield
    quad::QuadIdeal q0;           // pinning prime: x(q0) = 1 and Frob_{q0} = sigma_x

    NfElem apply_sigma(const NfElem& z, unsigned k = 1) const;
};

// Build L_x realizing ker x, with sigma_x pinned by the Artin symbol of a
// degree-1 prime q0 with x(q0) = 1.  G must be the class group of D.
UnramifiedExtension build_extension(const mpz_class& D, const mpz_class& p,
                                    const quad::CharacterModP& x, const quad::ClassGroupQF& G,
                                    const std::vector<ExtensionProviderRecord>& provider = {});

// k in Z/p with Frob_q = sigma_x^k, for a degree-1 prime q of K above an odd
// split rational prime.  Throws DegeneratePrime when root matching mod q is
// ambiguous (q divides the relevant index data).
mpz_class frobenius_class(const UnramifiedExtension& L, const quad::QuadIdeal& q);

struct UnramifiedReport {
    bool pass = false;
    mpz_class disc_found;
    mpz_class disc_expected;
    std::vector<mpz_class> ramified_witnesses;  // primes with wrong disc valuation
};
UnramifiedReport verify_unramified(const NumberFieldOrder& L, const mpz_class& D,
                                   const mpz_class& p);
UnramifiedReport verify_unramified(const UnramifiedExtension& L);

}  // namespace cft::unram
