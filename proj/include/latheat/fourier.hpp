#pragma once

#include "latheat/lattice.hpp"

namespace latheat {

// ---------------------------------------------------------------------------
// Discrete Fourier pair between the lattice and its dual frequency grid.
//
//   forward:  u^(xi) = hbar^{n/2} sum_k u(k) e^{-2 pi i k.xi}
//   inverse:  u(k)   = hbar^{n/2} sum_xi u^(xi) e^{+2 pi i k.xi} * (N hbar)^{-n}
//
// The inverse realizes the torus integral by its exact quadrature on the dual
// grid (cell volume (N hbar)^{-n} per node), so inverse(forward(f)) == f up to
// rounding. Both ends use the natural index order [-N/2, N/2); wrapping to
// the fast-transform layout is internal.
//
// Power-of-two axis lengths take a radix-2 path; other even lengths fall back
// to a direct O(N^2) transform per axis. Lines are independent, so the result
// is identical for any thread count.
// ---------------------------------------------------------------------------

SpectralFunction forward(const GridFunction& f);
GridFunction inverse(const SpectralFunction& g);

// Sobolev norm of spectral data of order s: equals weighted_norm(inverse(g), s).
double sobolev_norm(const SpectralFunction& g, double s);

} // namespace latheat
