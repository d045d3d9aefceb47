#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "latheat/fourier.hpp"
#include "latheat/reference.hpp"

using namespace latheat;

TEST_CASE("unit mass transforms to a flat spectrum") {
    for (double hbar : {1.0, 0.25}) {
        const LatticeSpec spec{2, hbar, 8};
        const SpectralFunction g = forward(point_mass(spec));
        const double expect = std::pow(hbar, 1.0); // hbar^{n/2}, n = 2
        for (std::size_t i = 0; i < g.size(); ++i) {
            CHECK(g[i].real() == doctest::Approx(expect).epsilon(1e-13));
            CHECK(std::abs(g[i].imag()) < 1e-14);
        }
    }
}

TEST_CASE("constant concentrates at the zero frequency") {
    // oracle: tiny-N direct geometric sum
    const LatticeSpec spec{1, 0.5, 4};
    const complex_t c(1.3, -0.4);
    const GridFunction f = constant_grid(spec, c);
    const SpectralFunction direct = ref::forward(f);
    const SpectralFunction fast = forward(f);
    for (std::size_t i = 0; i < fast.size(); ++i) CHECK(std::abs(fast[i] - direct[i]) < 1e-13);
    const std::vector<int> zero{0};
    const complex_t at0 = fast.at(zero);
    CHECK(std::abs(at0 - c * std::sqrt(0.5) * 4.0) < 1e-13); // c hbar^{1/2} N
    for (std::size_t i = 0; i < fast.size(); ++i)
        if (i != flat_index(spec, zero)) CHECK(std::abs(fast[i]) < 1e-13);
}

TEST_CASE("indicator spectrum inverts to a plane wave") {
    const LatticeSpec spec{1, 1.0, 8};
    const std::vector<int> zero{0};
    const GridFunction g = inverse(mode_spectrum(spec, zero, 1.0));
    // direct-sum oracle: constant hbar^{1/2} * cellvol
    const GridFunction direct = ref::inverse(mode_spectrum(spec, zero, 1.0));
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(std::abs(g[i] - direct[i]) < 1e-14);
        CHECK(g[i].real() == doctest::Approx(1.0 / 8.0).epsilon(1e-13));
    }
}

TEST_CASE("round trip on random fields") {
    Rng rng(21);
    for (const LatticeSpec spec : {LatticeSpec{1, 0.5, 64}, LatticeSpec{2, 2.0, 16},
                                   LatticeSpec{3, 0.125, 8}, LatticeSpec{1, 1.0, 12}}) {
        const GridFunction f = random_grid(spec, rng);
        const GridFunction back = inverse(forward(f));
        double sup = 0.0, ref_sup = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            sup = std::max(sup, std::abs(f[i] - back[i]));
            ref_sup = std::max(ref_sup, std::abs(f[i]));
        }
        CHECK(sup <= 1e-12 * ref_sup);

        const SpectralFunction g = forward(f);
        const SpectralFunction g2 = forward(inverse(g));
        double sup2 = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) sup2 = std::max(sup2, std::abs(g[i] - g2[i]));
        CHECK(sup2 <= 1e-12 * ref_sup);
    }
}

TEST_CASE("fast path agrees with the direct definition") {
    Rng rng(22);
    for (const LatticeSpec spec : {LatticeSpec{1, 0.75, 10}, LatticeSpec{2, 1.5, 6}}) {
        const GridFunction f = random_grid(spec, rng);
        const SpectralFunction a = forward(f);
        const SpectralFunction b = ref::forward(f);
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-12);
    }
}

TEST_CASE("plancherel identity") {
    Rng rng(23);
    for (const LatticeSpec spec : {LatticeSpec{1, 0.5, 64}, LatticeSpec{2, 0.25, 16}}) {
        for (double s : {-1.0, 0.0, 2.0}) {
            for (int trial = 0; trial < 5; ++trial) {
                const GridFunction f = random_grid(spec, rng);
                const double lhs = weighted_norm(f, s);
                const double rhs = sobolev_norm(forward(f), s);
                CHECK(std::abs(lhs - rhs) <= 1e-10 * lhs);
            }
        }
    }
}

TEST_CASE("sobolev norm of zero data") {
    const LatticeSpec spec{2, 1.0, 8};
    CHECK(sobolev_norm(SpectralFunction::zeros(spec), 1.5) == 0.0);
}

TEST_CASE("sobolev norm at s=0 is the plain l2 norm of the inverse") {
    const LatticeSpec spec{1, 0.5, 16};
    Rng rng(24);
    std::vector<complex_t> v(spec.site_count());
    for (auto& z : v) z = complex_t(rng.uniform(-1, 1), rng.uniform(-1, 1));
    const SpectralFunction g(spec, std::move(v));
    const GridFunction back = ref::inverse(g);
    double acc = 0.0;
    for (std::size_t i = 0; i < back.size(); ++i) acc += std::norm(back[i]);
    CHECK(sobolev_norm(g, 0.0) == doctest::Approx(std::sqrt(acc)).epsilon(1e-12));
}

TEST_CASE("zero spectral data inverts to the zero field") {
    const LatticeSpec spec{2, 0.5, 8};
    const GridFunction z = inverse(SpectralFunction::zeros(spec));
    for (std::size_t i = 0; i < z.size(); ++i) CHECK(z[i] == complex_t(0.0));
}

TEST_CASE("transforms are linear") {
    const LatticeSpec spec{2, 0.5, 8};
    Rng rng(25);
    const GridFunction f = random_grid(spec, rng);
    const GridFunction g = random_grid(spec, rng);
    const complex_t c(0.3, 1.1);
    const SpectralFunction lhs = forward(add(scale(f, c), g));
    const SpectralFunction fa = forward(f);
    const SpectralFunction ga = forward(g);
    for (std::size_t i = 0; i < lhs.size(); ++i)
        CHECK(std::abs(lhs[i] - (c * fa[i] + ga[i])) < 1e-12);

    // and the inverse direction on random spectral pairs
    std::vector<complex_t> va(spec.site_count()), vb(spec.site_count());
    for (std::size_t i = 0; i < va.size(); ++i) {
        va[i] = complex_t(rng.uniform(-1, 1), rng.uniform(-1, 1));
        vb[i] = complex_t(rng.uniform(-1, 1), rng.uniform(-1, 1));
        va[i] = c * va[i];
    }
    const SpectralFunction sa(spec, va);
    const SpectralFunction sb(spec, vb);
    std::vector<complex_t> vsum(va.size());
    for (std::size_t i = 0; i < va.size(); ++i) vsum[i] = va[i] + vb[i];
    const GridFunction both = inverse(SpectralFunction(spec, vsum));
    const GridFunction ia = inverse(sa);
    const GridFunction ib = inverse(sb);
    for (std::size_t i = 0; i < both.size(); ++i)
        CHECK(std::abs(both[i] - (ia[i] + ib[i])) < 1e-12);
}
