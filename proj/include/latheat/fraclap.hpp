#pragma once

#include <span>
#include <vector>

#include "latheat/lattice.hpp"

namespace latheat {

// ---------------------------------------------------------------------------
// Fractional powers of the (negative) lattice Laplacian.
//
// Stencil form:   (Lap^alpha u)(k) = sum_{|j|_inf <= R} a_j u(k + j*hbar),
// with coefficients
//   a_j = integral over [-1/2,1/2]^n of [sum_l 4 sin^2(pi xi_l)]^alpha
//         e^{-2 pi i j.xi} d(xi),
// computed by the M^n-point periodic trapezoidal rule, i.e. the inverse
// discrete transform of symbol samples. The M-sample kernel lives on
// [-M/2, M/2)^n; two policies map it onto the stored box [-R, R]^n:
//
//   fold_periodic    wrap indices modulo 2R (edge classes split evenly
//                    between -R and +R to keep a_j = a_{-j}). With R = N/2
//                    and M a multiple of N this reproduces the exact periodic
//                    kernel of the N-lattice, the stencil and spectral paths
//                    agree to rounding, and the row sum vanishes.
//   truncate_report  keep the raw coefficients for |j|_inf <= R and report
//                    the dropped tail; the row sum plus the signed tail
//                    vanishes. For coefficient inspection and radius studies.
//
// Both policies report the absolute tail mass sum_{|j|>R} |a_j| and the
// signed tail sum of the M-sample kernel.
// ---------------------------------------------------------------------------

enum class TailPolicy { fold_periodic, truncate_report };

struct StencilKernel {
    double alpha = 1.0;
    int dim = 1;
    int radius = 1;      // coefficients kept for |j|_inf <= radius
    int quad_points = 0; // M
    TailPolicy policy = TailPolicy::fold_periodic;
    std::vector<double> coeffs; // (2R+1)^n, row-major, axis range [-R, R]
    double tail_mass = 0.0;     // sum_{|j|_inf > R} |a_j| of the M-sample kernel
    double tail_signed = 0.0;   // signed sum of the same entries
    double max_imag_residue = 0.0;

    std::size_t side() const { return static_cast<std::size_t>(2 * radius + 1); }
    std::size_t coeff_count() const;
    double coeff(std::span<const int> j) const;
    double row_sum() const;
};

// Requires quad_points >= 2*radius + 2 (rejects aliasing of the target box).
// Deterministic for fixed arguments. Quadrature results whose imaginary part
// exceeds 1e-13 signal a symmetry bug and raise numeric_error.
StencilKernel stencil_coefficients(double alpha, int dim, int radius, int quad_points,
                                   TailPolicy policy = TailPolicy::fold_periodic);

// Periodic (wrap-around) convolution with the kernel: the UNSCALED operator,
// no hbar^{-2 alpha} factor.
GridFunction apply_stencil(const GridFunction& f, const StencilKernel& kernel);

// ---------------------------------------------------------------------------
// Fourier multiplier form.
// ---------------------------------------------------------------------------

struct SymbolField {
    LatticeSpec spec;
    double alpha = 1.0;
    bool continuous = false;    // true: |2 pi xi|^{2 alpha}; false: nu^2
    std::vector<double> values; // nonnegative, one per dual node

    double operator[](std::size_t flat) const { return values[flat]; }
};

// nu^2(xi) = hbar^{-2 alpha} [sum_l 4 sin^2(pi hbar xi_l)]^alpha on the dual grid.
SymbolField lattice_symbol(const LatticeSpec& spec, double alpha);

// |2 pi xi|^{2 alpha} on the dual grid (for the continuum comparison solve).
SymbolField continuous_symbol(const LatticeSpec& spec, double alpha);

// inverse(sym * forward(f)). With scaled = true the stored multiplier is used
// as-is; with scaled = false a lattice symbol is first multiplied by
// hbar^{2 alpha}, recovering the unscaled stencil operator.
GridFunction apply_spectral(const GridFunction& f, const SymbolField& sym, bool scaled);

} // namespace latheat
