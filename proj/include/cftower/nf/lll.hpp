#pragma once
// Short elements of a fractional ideal: the ideal lattice under the canonical
// embedding is Gram-approximated at a chosen precision, LLL-reduced with exact
// rational arithmetic on the integer Gram matrix, and the reduced rows are
// mapped back to field elements.  All numerics are advisory; callers verify
// algebraically, so precision is a performance knob only.

#include "cftower/nf/ideal.hpp"

namespace cft::nf {

struct PrecisionRetry : std::runtime_error {
    explicit PrecisionRetry(const std::string& m) : std::runtime_error(m) {}
};

// LLL (delta = 3/4) on a symmetric positive definite integer Gram matrix.
// Returns the unimodular transform U whose rows give the reduced basis in
// terms of the input basis; returns false if G is not positive definite
// (e.g. rounding noise), in which case callers should raise precision.
bool lll_gram(const IntMatrix& G, IntMatrix& U);

// T2 Gram matrix of the rows of (M / den) w.r.t. the order O, rounded to
// integers after scaling by 2^scale_bits; computed at prec_bits float
// precision.
IntMatrix t2_gram(const NumberFieldOrder& O, const IntMatrix& M, const mpz_class& den,
                  long prec_bits, long scale_bits);

// LLL-reduced elements of the ideal I, shortest candidates first.  Retries
// internally with doubled precision; throws PrecisionRetry when the cap is
// reached.
std::vector<NfElem> short_ideal_elements(const NumberFieldOrder& O, const FracIdeal& I,
                                         long prec_bits = 128);

}  // namespace cft::nf
