// Benchmark of the OpenMP kernels against the serial reference
// implementations. Each row reports both timings and the worst elementwise
// deviation between the two paths, so the run doubles as a consistency check.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "latheat/fourier.hpp"
#include "latheat/fraclap.hpp"
#include "latheat/reference.hpp"

using namespace latheat;
using clock_type = std::chrono::steady_clock;

namespace {

double ms_since(clock_type::time_point t0) {
    return std::chrono::duration<double, std::milli>(clock_type::now() - t0).count();
}

template <class F>
double time_best_of(int reps, F&& f) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = clock_type::now();
        f();
        best = std::min(best, ms_since(t0));
    }
    return best;
}

double max_dev(const GridFunction& a, const GridFunction& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double max_dev(const SpectralFunction& a, const SpectralFunction& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

void row(const char* name, double serial_ms, double parallel_ms, double dev) {
    std::printf("%-28s %10.3f %10.3f %8.2fx   %8.1e\n", name, serial_ms, parallel_ms,
                serial_ms / parallel_ms, dev);
}

} // namespace

int main(int argc, char** argv) {
    bool quick = false;
    for (int i = 1; i < argc; ++i)
        if (std::string(argv[i]) == "--quick") quick = true;

    int threads = 1;
#ifdef _OPENMP
#pragma omp parallel
    {
#pragma omp single
        threads = omp_get_num_threads();
    }
#endif
    std::printf("threads: %d%s\n\n", threads, quick ? " (quick mode)" : "");
    std::printf("%-28s %10s %10s %9s   %8s\n", "kernel", "serial/ms", "omp/ms", "speedup",
                "max|diff|");

    const int reps = quick ? 2 : 5;

    { // weighted norm, 1-d
        const LatticeSpec spec{1, 0.01, quick ? 4096 : 65536};
        Rng rng(11);
        const GridFunction f = random_grid(spec, rng);
        double a = 0, b = 0;
        const double ts = time_best_of(reps, [&] { a = ref::weighted_norm(f, 1.5); });
        const double tp = time_best_of(reps, [&] { b = weighted_norm(f, 1.5); });
        row("weighted_norm (s=1.5)", ts, tp, std::abs(a - b));
    }

    { // forward transform vs direct definition, small (direct is O(M^2))
        const LatticeSpec spec{2, 0.25, quick ? 16 : 32};
        Rng rng(12);
        const GridFunction f = random_grid(spec, rng);
        SpectralFunction a = ref::forward(f), b = forward(f);
        const double ts = time_best_of(reps, [&] { a = ref::forward(f); });
        const double tp = time_best_of(reps, [&] { b = forward(f); });
        row("forward (direct vs fft)", ts, tp, max_dev(a, b));
    }

    { // stencil application
        const LatticeSpec spec{2, 0.5, quick ? 16 : 48};
        Rng rng(13);
        const GridFunction f = random_grid(spec, rng);
        const StencilKernel k =
            stencil_coefficients(0.75, 2, spec.points / 2, 4 * spec.points);
        GridFunction a = ref::apply_stencil(f, k), b = apply_stencil(f, k);
        const double ts = time_best_of(reps, [&] { a = ref::apply_stencil(f, k); });
        const double tp = time_best_of(reps, [&] { b = apply_stencil(f, k); });
        row("apply_stencil (R=N/2)", ts, tp, max_dev(a, b));
    }

    { // spectral multiplier application (fft path only; serial = 1 thread run)
        const LatticeSpec spec{2, 0.25, quick ? 32 : 128};
        Rng rng(14);
        const GridFunction f = random_grid(spec, rng);
        const SymbolField sym = lattice_symbol(spec, 0.75);
        GridFunction b = apply_spectral(f, sym, true);
        const double tp = time_best_of(reps, [&] { b = apply_spectral(f, sym, true); });
        // reference route: stencil with the full periodic kernel
        const StencilKernel k =
            stencil_coefficients(0.75, 2, spec.points / 2, 4 * spec.points);
        GridFunction a = ref::apply_stencil(f, k);
        const double ts = time_best_of(quick ? 1 : 2, [&] { a = ref::apply_stencil(f, k); });
        GridFunction scaled = scale(b, std::pow(spec.hbar, 2.0 * 0.75));
        row("multiplier vs stencil", ts, tp, max_dev(a, scaled));
    }

    return 0;
}
