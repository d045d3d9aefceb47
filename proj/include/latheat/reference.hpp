#pragma once

#include "latheat/fraclap.hpp"
#include "latheat/lattice.hpp"

// Serial reference implementations, straight from the defining sums. They are
// kept deliberately naive: the test suites use them as independent oracles for
// the parallel kernels, and the benchmark compares against them.

namespace latheat::ref {

double weighted_norm(const GridFunction& f, double s);
complex_t weighted_inner_product(const GridFunction& u, const GridFunction& v, double s);

// Direct O(M^2) evaluation of the transform pair over flat indices (no
// per-axis factorization).
SpectralFunction forward(const GridFunction& f);
GridFunction inverse(const SpectralFunction& g);

// Direct periodic convolution, serial.
GridFunction apply_stencil(const GridFunction& f, const StencilKernel& kernel);

// One stencil coefficient by direct real quadrature:
//   a_j ~= M^{-n} sum_q [sum_l 4 sin^2(pi q_l / M)]^alpha cos(2 pi j.q / M).
double stencil_coefficient(double alpha, int dim, std::span<const int> j, int quad_points);

} // namespace latheat::ref
