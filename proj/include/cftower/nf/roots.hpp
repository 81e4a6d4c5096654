#pragma once
// Roots of an integer polynomial inside a number field: Hensel lifting at a
// completely split prime, lattice recognition (Babai on an LLL-reduced basis
// of Q^m), and exact verification of every returned root.

#include "cftower/nf/ideal.hpp"
#include "cftower/nf/lll.hpp"

namespace cft::nf {

// All roots of monic squarefree f in O (f integer coefficients).  Throws
// PrecisionRetry if recognition keeps failing after the internal budgets.
// The expected count may be passed to stop early; 0 means "find what's there"
// (all l-adic roots are tried either way).
std::vector<NfElem> roots_in_field(const NumberFieldOrder& O, const exact::ZPoly& f,
                                   std::size_t expected = 0);

}  // namespace cft::nf
