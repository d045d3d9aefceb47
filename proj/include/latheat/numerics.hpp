#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "latheat/errors.hpp"

namespace latheat {

using complex_t = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// Deterministic reductions.
//
// Sums are organized as fixed 4096-element blocks: each block is accumulated
// serially in index order, block partials are folded pairwise. The grouping
// depends only on the data length, never on the thread count, so results are
// bit-identical for any OMP_NUM_THREADS.
// ---------------------------------------------------------------------------

inline constexpr std::size_t kReduceBlock = 4096;

namespace detail {

template <class T>
T pairwise_fold(std::span<T> partials) {
    std::size_t n = partials.size();
    while (n > 1) {
        const std::size_t half = n / 2;
        for (std::size_t i = 0; i < half; ++i)
            partials[i] = partials[2 * i] + partials[2 * i + 1];
        if (n % 2 != 0) {
            partials[half] = partials[n - 1];
            n = half + 1;
        } else {
            n = half;
        }
    }
    return n == 0 ? T{} : partials[0];
}

} // namespace detail

// Sum f(i) for i in [0, n) with the fixed-block pairwise scheme.
template <class T, class F>
T block_sum(std::size_t n, F&& f) {
    if (n == 0) return T{};
    const std::size_t nblocks = (n + kReduceBlock - 1) / kReduceBlock;
    std::vector<T> partials(nblocks, T{});
#pragma omp parallel for schedule(static)
    for (long long b = 0; b < static_cast<long long>(nblocks); ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * kReduceBlock;
        const std::size_t hi = std::min(lo + kReduceBlock, n);
        T acc{};
        for (std::size_t i = lo; i < hi; ++i) acc += f(i);
        partials[static_cast<std::size_t>(b)] = acc;
    }
    return detail::pairwise_fold(std::span<T>(partials));
}

// ---------------------------------------------------------------------------
// Composite Simpson utilities on uniform grids.
// ---------------------------------------------------------------------------

// Integral of samples g over a uniform grid with step dt; g.size() must be
// odd (an even number of panels).
double simpson_integral(std::span<const double> g, double dt);

// Cumulative integral C with C[0] = 0 on a uniform grid, g.size() = steps+1,
// steps even. Even nodes use composite Simpson over node pairs; odd nodes use
// the 3-point one-sided rule
//   C[2j+1] = C[2j] + dt/12 (5 g[2j] + 8 g[2j+1] - g[2j+2]),
// which is exact for quadratics (and for data constant on [t_{2j}, t_{2j+2}]).
std::vector<double> cumulative_integral(std::span<const double> g, double dt);

// ---------------------------------------------------------------------------
// Gauss-Legendre panels (for smooth auxiliary integrals).
// ---------------------------------------------------------------------------

struct GaussRule {
    std::vector<double> nodes;   // on (-1, 1)
    std::vector<double> weights;
};

// Nodes/weights via Newton iteration on the Legendre polynomial; cached.
const GaussRule& gauss_rule(int order);

// Integrate f over [a, b] with `panels` equal panels of the given rule order.
template <class F>
double gauss_integrate(F&& f, double a, double b, int panels = 8, int order = 12) {
    const GaussRule& rule = gauss_rule(order);
    const double h = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        double acc = 0.0;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q)
            acc += rule.weights[q] * f(mid + 0.5 * h * rule.nodes[q]);
        total += 0.5 * h * acc;
    }
    return total;
}

// ---------------------------------------------------------------------------
// Ordinary least squares on (x, y) pairs.
// ---------------------------------------------------------------------------

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double max_abs_residual = 0.0;
};

LinearFit fit_line(std::span<const double> x, std::span<const double> y);

// Fit log(y) = intercept + slope * log(x) over the last ceil(n/2) points
// (the asymptotic regime of a refinement sweep). All y must be positive.
LinearFit fit_loglog_tail(std::span<const double> x, std::span<const double> y);

// ---------------------------------------------------------------------------
// Deterministic PRNG (splitmix64). Distribution code is hand-rolled so that
// streams are reproducible across standard libraries.
// ---------------------------------------------------------------------------

struct Rng {
    std::uint64_t state;

    explicit Rng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [a, b) with 53-bit resolution.
    double uniform(double a = 0.0, double b = 1.0) {
        const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
        return a + (b - a) * u;
    }

    int uniform_int(int lo, int hi) { // inclusive bounds
        return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
    }
};

} // namespace latheat
