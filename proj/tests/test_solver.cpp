#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "latheat/fourier.hpp"
#include "latheat/solver.hpp"

using namespace latheat;

namespace {

TimeGrid grid_for(const SolveConfig& cfg) {
    return TimeGrid{0.0, cfg.horizon / cfg.time_steps, cfg.time_steps + 1};
}

SolveConfig base_config(double T = 1.0, int nt = 256, double alpha = 0.75) {
    SolveConfig cfg;
    cfg.horizon = T;
    cfg.time_steps = nt;
    cfg.alpha = alpha;
    cfg.keep_spectral = true;
    cfg.norm_history = true;
    return cfg;
}

} // namespace

TEST_CASE("constant coefficients reproduce the exponential closed form") {
    const LatticeSpec spec{1, 0.5, 16};
    SolveConfig cfg = base_config();
    const TimeGrid grid = grid_for(cfg);
    const auto a = sample_direct(CoefficientModel::constant(1.0), grid);
    Rng rng(50);
    const GridFunction u0 = random_grid(spec, rng);
    const SymbolField sym = lattice_symbol(spec, cfg.alpha);
    const SpectralFunction u0h = forward(u0);

    for (double bval : {0.0, 1.0}) {
        const auto b = sample_direct(CoefficientModel::constant(bval), grid);
        const Trajectory traj = solve(u0, SourceTerm::zero(), a, b, cfg);
        double max_rel = 0.0;
        for (std::size_t o = 0; o < traj.times.size(); ++o) {
            for (std::size_t m = 0; m < u0h.size(); ++m) {
                const complex_t expect =
                    u0h[m] * std::exp(-(sym.values[m] + bval) * traj.times[o]);
                const double denom = std::max(std::abs(expect), 1e-280);
                max_rel = std::max(max_rel,
                                   std::abs(traj.spectral_states[o][m] - expect) / denom);
            }
        }
        CHECK(max_rel < 1e-10);
    }
}

TEST_CASE("time-constant source reproduces the closed-form response") {
    const LatticeSpec spec{1, 1.0, 16};
    SolveConfig cfg = base_config(1.0, 256, 0.75);
    const TimeGrid grid = grid_for(cfg);
    const auto a = sample_direct(CoefficientModel::constant(1.0), grid);
    const auto b = sample_direct(CoefficientModel::constant(0.0), grid);
    Rng rng(51);
    const GridFunction prof = random_grid(spec, rng);
    const SourceTerm f =
        SourceTerm::separable(prof, std::vector<double>(static_cast<std::size_t>(cfg.time_steps) + 1, 1.0));
    const Trajectory traj = solve(GridFunction::zeros(spec), f, a, b, cfg);
    const SymbolField sym = lattice_symbol(spec, cfg.alpha);
    const SpectralFunction fh = forward(prof);
    double max_err = 0.0;
    for (std::size_t o = 0; o < traj.times.size(); ++o) {
        const double t = traj.times[o];
        for (std::size_t m = 0; m < fh.size(); ++m) {
            const double nu2 = sym.values[m];
            // (1 - e^{-nu2 t}) f^/nu2, with the removable limit t f^ at nu2 = 0
            const complex_t expect =
                nu2 > 0.0 ? fh[m] * (1.0 - std::exp(-nu2 * t)) / nu2 : fh[m] * t;
            max_err = std::max(max_err, std::abs(traj.spectral_states[o][m] - expect));
        }
    }
    CHECK(max_err < 1e-8 * weighted_norm(prof, 0.0));
}

TEST_CASE("piecewise-constant coefficients are integrated exactly") {
    // a jumps at an odd grid node whose sample carries the mean of the two
    // levels; each Simpson pair then integrates its side exactly and the
    // solver reproduces the product of the two exponentials.
    const LatticeSpec spec{1, 1.0, 8};
    SolveConfig cfg = base_config(1.0, 64, 1.0);
    const TimeGrid grid = grid_for(cfg);
    const int jump_node = 33;
    const double tj = grid.node(jump_node);
    std::vector<double> av(static_cast<std::size_t>(grid.count)), zeros(av.size(), 0.0);
    for (int i = 0; i < grid.count; ++i)
        av[static_cast<std::size_t>(i)] = i < jump_node ? 1.0 : (i > jump_node ? 3.0 : 2.0);
    const SampledCoefficient a{grid, av, zeros};
    const SampledCoefficient b{grid, zeros, zeros};
    const GridFunction u0 = point_mass(spec);
    const Trajectory traj = solve(u0, SourceTerm::zero(), a, b, cfg);
    const SymbolField sym = lattice_symbol(spec, 1.0);
    const SpectralFunction u0h = forward(u0);
    for (std::size_t o = 0; o < traj.times.size(); ++o) {
        const double t = traj.times[o];
        const double at = t <= tj ? t : tj + 3.0 * (t - tj);
        for (std::size_t m = 0; m < u0h.size(); ++m) {
            const complex_t expect = u0h[m] * std::exp(-sym.values[m] * at);
            CHECK(std::abs(traj.spectral_states[o][m] - expect) <=
                  1e-12 * std::max(1.0, std::abs(expect)));
        }
    }
}

TEST_CASE("solver is linear in data and source") {
    const LatticeSpec spec{1, 0.5, 8};
    SolveConfig cfg = base_config(0.5, 64, 0.6);
    const TimeGrid grid = grid_for(cfg);
    const auto a = sample_direct(CoefficientModel::constant(1.2), grid);
    const auto b = sample_direct(CoefficientModel::constant(-0.3), grid);
    Rng rng(52);
    const GridFunction u0 = random_grid(spec, rng);
    const GridFunction v0 = random_grid(spec, rng);
    const GridFunction pf = random_grid(spec, rng);
    const GridFunction pg = random_grid(spec, rng);
    std::vector<double> fac1(static_cast<std::size_t>(cfg.time_steps) + 1);
    std::vector<double> fac2(fac1.size());
    for (std::size_t i = 0; i < fac1.size(); ++i) {
        const double t = grid.node(static_cast<int>(i));
        fac1[i] = std::cos(2.0 * t);
        fac2[i] = 1.0 + t;
    }
    // same factor so the sum is again separable
    const Trajectory t1 = solve(u0, SourceTerm::separable(pf, fac1), a, b, cfg);
    const Trajectory t2 = solve(v0, SourceTerm::separable(pg, fac1), a, b, cfg);
    const Trajectory ts = solve(add(u0, v0), SourceTerm::separable(add(pf, pg), fac1), a, b, cfg);
    for (std::size_t o = 0; o < ts.times.size(); ++o) {
        const GridFunction sum = add(t1.states[o], t2.states[o]);
        CHECK(l2_distance(ts.states[o], sum) <= 1e-12 * (1.0 + weighted_norm(sum, 0.0)));
    }
    (void)fac2;
}

TEST_CASE("a general sampled source matches the separable superposition") {
    // f(t,k) = cos(2t) p1(k) + (1+t) p2(k) is not separable as one term, but
    // equals the sum of two separable problems by linearity, which gives an
    // exact oracle for the provider-sampled path.
    const LatticeSpec spec{1, 0.5, 8};
    SolveConfig cfg = base_config(0.75, 64, 0.8);
    const TimeGrid grid = grid_for(cfg);
    const auto a = sample_direct(CoefficientModel::constant(1.0), grid);
    const auto b = sample_direct(CoefficientModel::constant(0.2), grid);
    Rng rng(62);
    const GridFunction p1 = random_grid(spec, rng);
    const GridFunction p2 = random_grid(spec, rng);
    const GridFunction z = GridFunction::zeros(spec);

    const SourceTerm general = SourceTerm::from_provider(
        [&](double t) {
            return add(scale(p1, std::cos(2.0 * t)), scale(p2, 1.0 + t));
        },
        cfg.horizon, cfg.time_steps);

    std::vector<double> f1(static_cast<std::size_t>(cfg.time_steps) + 1);
    std::vector<double> f2(f1.size());
    for (int i = 0; i <= cfg.time_steps; ++i) {
        f1[static_cast<std::size_t>(i)] = std::cos(2.0 * grid.node(i));
        f2[static_cast<std::size_t>(i)] = 1.0 + grid.node(i);
    }
    const Trajectory tg = solve(z, general, a, b, cfg);
    const Trajectory t1 = solve(z, SourceTerm::separable(p1, f1), a, b, cfg);
    const Trajectory t2 = solve(z, SourceTerm::separable(p2, f2), a, b, cfg);
    for (std::size_t o = 0; o < tg.times.size(); ++o) {
        const GridFunction sum = add(t1.states[o], t2.states[o]);
        CHECK(l2_distance(tg.states[o], sum) <= 1e-12 * (1.0 + weighted_norm(sum, 0.0)));
    }
}

TEST_CASE("larger damping never increases the norm") {
    const LatticeSpec spec{1, 0.5, 16};
    SolveConfig cfg = base_config(1.0, 128, 0.9);
    const TimeGrid grid = grid_for(cfg);
    const auto a = sample_direct(CoefficientModel::constant(1.0), grid);
    const auto b1 = sample_direct(CoefficientModel::constant(0.2), grid);
    const auto b2 = sample_direct(CoefficientModel::constant(0.7), grid);
    Rng rng(53);
    const GridFunction u0 = random_grid(spec, rng);
    const Trajectory t1 = solve(u0, SourceTerm::zero(), a, b1, cfg);
    const Trajectory t2 = solve(u0, SourceTerm::zero(), a, b2, cfg);
    for (std::size_t o = 0; o < t1.times.size(); ++o)
        CHECK(weighted_norm(t2.states[o], 0.0) <= weighted_norm(t1.states[o], 0.0) + 1e-12);
}

TEST_CASE("time refinement converges at fourth order") {
    // smooth nonconstant coefficients and a nontrivial source
    const LatticeSpec spec{1, 1.0, 8};
    CoefficientModel am;
    am.regular.kind = RegularPart::Kind::polynomial;
    am.regular.poly = {1.0, 0.5, 0.25};
    CoefficientModel bm;
    bm.regular.kind = RegularPart::Kind::oscillation;
    bm.regular.base = 0.2;
    bm.regular.amplitude = 0.5;
    bm.regular.omega = 3.0;
    Rng rng(54);
    const GridFunction u0 = random_grid(spec, rng);
    const GridFunction prof = random_grid(spec, rng);

    auto run = [&](int nt) {
        SolveConfig cfg = base_config(1.0, nt, 0.75);
        cfg.output_nodes = {nt};
        cfg.norm_history = false;
        const TimeGrid grid = grid_for(cfg);
        std::vector<double> fac(static_cast<std::size_t>(nt) + 1);
        for (int i = 0; i <= nt; ++i) fac[static_cast<std::size_t>(i)] = std::sin(3.0 * grid.node(i));
        return solve(u0, SourceTerm::separable(prof, fac), sample_direct(am, grid),
                     sample_direct(bm, grid), cfg)
            .states.back();
    };

    const GridFunction fine = run(2048);
    const double e1 = l2_distance(run(32), fine);
    const double e2 = l2_distance(run(64), fine);
    const double e3 = l2_distance(run(128), fine);
    CHECK(e1 / e2 > 12.0); // >= 4th order would give 16
    CHECK(e2 / e3 > 12.0);
}

TEST_CASE("stiff modes underflow to exact zeros without overflow") {
    const LatticeSpec spec{1, 1.0 / 1024.0, 64}; // nu^2 up to ~4e6
    SolveConfig cfg = base_config(1.0, 64, 1.0);
    const TimeGrid grid = grid_for(cfg);
    const auto a = sample_direct(CoefficientModel::constant(1.0), grid);
    const auto b = sample_direct(CoefficientModel::constant(-0.5), grid);
    Rng rng(55);
    const GridFunction u0 = random_grid(spec, rng);
    const GridFunction prof = random_grid(spec, rng);
    const SourceTerm f =
        SourceTerm::separable(prof, std::vector<double>(static_cast<std::size_t>(cfg.time_steps) + 1, 1.0));
    const Trajectory traj = solve(u0, f, a, b, cfg);
    CHECK(traj.max_step_exponent > 700.0);
    const std::vector<int> edge{-32};
    const std::size_t m = flat_index(spec, edge);
    double fh_edge = 0.0;
    {
        const SpectralFunction fh = forward(prof);
        fh_edge = std::abs(fh[m]);
    }
    const double dt = cfg.horizon / cfg.time_steps;
    for (std::size_t o = 1; o < traj.times.size(); ++o) {
        const complex_t v = traj.spectral_states[o][m];
        CHECK(std::isfinite(v.real()));
        CHECK(std::isfinite(v.imag()));
        // only the last Simpson panel of source history survives at the
        // stiff edge; everything older has underflowed
        CHECK(std::abs(v) <= dt * fh_edge);
    }
    // without a source the stiff modes are exact zeros
    const Trajectory homog = solve(u0, SourceTerm::zero(), a, b, cfg);
    for (std::size_t o = 1; o < homog.times.size(); ++o)
        CHECK(std::abs(homog.spectral_states[o][m]) == 0.0);
}

TEST_CASE("energy stays within the coefficient bounds and decays") {
    const LatticeSpec spec{1, 0.5, 16};
    SolveConfig cfg = base_config(1.0, 128, 0.75);
    cfg.weight_order = 1.0;
    const TimeGrid grid = grid_for(cfg);
    CoefficientModel am;
    am.regular.kind = RegularPart::Kind::oscillation;
    am.regular.base = 1.5;
    am.regular.amplitude = 0.4;
    am.regular.omega = 2.0;
    const auto a = sample_direct(am, grid);
    const auto b = sample_direct(CoefficientModel::constant(0.1), grid);
    Rng rng(56);
    const GridFunction u0 = random_grid(spec, rng);
    const Trajectory traj = solve(u0, SourceTerm::zero(), a, b, cfg);
    const double a0 = a.min_value();
    const double a1 = a.sup_abs_value();
    for (std::size_t o = 0; o < traj.times.size(); ++o) {
        const double n = weighted_norm(traj.states[o], 1.0);
        const double e = energy(traj, a, 1.0, o);
        CHECK(e >= a0 * n * n * (1.0 - 1e-12));
        CHECK(e <= a1 * n * n * (1.0 + 1e-12));
    }
    // constant a, b >= 0, no source: energy is nonincreasing
    const auto ac = sample_direct(CoefficientModel::constant(1.0), grid);
    const Trajectory tc = solve(u0, SourceTerm::zero(), ac, b, cfg);
    double prev = 1e300;
    for (std::size_t o = 0; o < tc.times.size(); ++o) {
        const double e = energy(tc, ac, 1.0, o);
        CHECK(e <= prev * (1.0 + 1e-12));
        prev = e;
    }
}

TEST_CASE("well-posedness constant closed forms") {
    const TimeGrid grid{0.0, 1.0 / 64, 65};
    const auto one = sample_direct(CoefficientModel::constant(1.0), grid);
    const auto zero = sample_direct(CoefficientModel::constant(0.0), grid);
    const auto two = sample_direct(CoefficientModel::constant(2.0), grid);
    CHECK(wellposedness_constant(one, zero, 1.0) == doctest::Approx(std::exp(1.0)).epsilon(1e-13));
    CHECK(wellposedness_constant(one, one, 1.0) == doctest::Approx(std::exp(3.0)).epsilon(1e-13));
    CHECK(wellposedness_constant(two, zero, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CoefficientModel neg = CoefficientModel::constant(-1.0);
    CHECK_THROWS_AS(wellposedness_constant(sample_direct(neg, grid), zero, 1.0),
                    positivity_error);
}

TEST_CASE("solution estimate holds with margin on a decaying run") {
    const LatticeSpec spec{1, 0.5, 16};
    SolveConfig cfg = base_config(1.0, 128, 0.8);
    const TimeGrid grid = grid_for(cfg);
    const auto a = sample_direct(CoefficientModel::constant(1.0), grid);
    const auto b = sample_direct(CoefficientModel::constant(0.0), grid);
    Rng rng(57);
    const GridFunction u0 = random_grid(spec, rng);
    const Trajectory traj = solve(u0, SourceTerm::zero(), a, b, cfg);
    const EstimateReport rep = verify_estimate(traj, u0, SourceTerm::zero(), a, b, 0.0);
    CHECK(rep.pass);
    CHECK(rep.max_ratio < 1.0);
    CHECK(rep.ratios.front() == doctest::Approx(1.0 / rep.constant).epsilon(1e-10));
}

TEST_CASE("estimate at a zero horizon collapses to the data ratio") {
    const LatticeSpec spec{1, 1.0, 8};
    SolveConfig cfg;
    cfg.horizon = 0.0;
    cfg.weight_order = 0.0;
    const TimeGrid grid{0.0, 0.0, 1};
    const SampledCoefficient a{grid, {2.0}, {0.0}};
    const SampledCoefficient b{grid, {0.5}, {0.0}};
    Rng rng(58);
    const GridFunction u0 = random_grid(spec, rng);
    const Trajectory traj = solve(u0, SourceTerm::zero(), a, b, cfg);
    CHECK(traj.states.size() == 1);
    const EstimateReport rep = verify_estimate(traj, u0, SourceTerm::zero(), a, b, 0.0);
    // ratio = ||u0||^2 / (C ||u0||^2) = 1/C with C = 1 at T = 0
    CHECK(rep.max_ratio == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.pass);
}

TEST_CASE("randomized regular scenarios satisfy the estimate") {
    const LatticeSpec spec{1, 0.5, 16};
    Rng rng(59);
    for (int trial = 0; trial < 20; ++trial) {
        SolveConfig cfg = base_config(1.0, 128, 0.75);
        cfg.weight_order = trial % 2 == 0 ? 0.0 : 1.0;
        const TimeGrid grid = grid_for(cfg);
        CoefficientModel am;
        am.regular.kind = RegularPart::Kind::oscillation;
        am.regular.base = rng.uniform(1.0, 2.0);
        am.regular.amplitude = rng.uniform(0.0, am.regular.base - 0.5);
        am.regular.omega = rng.uniform(0.5, 5.0);
        CoefficientModel bm;
        bm.regular.kind = RegularPart::Kind::oscillation;
        bm.regular.base = rng.uniform(-0.5, 0.5);
        bm.regular.amplitude = rng.uniform(0.0, 0.5);
        bm.regular.omega = rng.uniform(0.5, 5.0);
        const auto a = sample_direct(am, grid);
        const auto b = sample_direct(bm, grid);
        const GridFunction u0 = random_grid(spec, rng);
        const GridFunction prof = random_grid(spec, rng);
        std::vector<double> fac(static_cast<std::size_t>(cfg.time_steps) + 1);
        for (int i = 0; i <= cfg.time_steps; ++i)
            fac[static_cast<std::size_t>(i)] = std::sin(rng.uniform(1.0, 3.0) * grid.node(i));
        const SourceTerm f = SourceTerm::separable(prof, fac);
        const Trajectory traj = solve(u0, f, a, b, cfg);
        const EstimateReport rep = verify_estimate(traj, u0, f, a, b, cfg.weight_order);
        CHECK(rep.max_ratio <= 1.0);
    }
}

TEST_CASE("solver rejects inconsistent inputs") {
    const LatticeSpec spec{1, 1.0, 8};
    SolveConfig cfg = base_config(1.0, 64, 1.0);
    const TimeGrid good = grid_for(cfg);
    const TimeGrid bad{0.0, 1.0 / 32, 33};
    const auto a_good = sample_direct(CoefficientModel::constant(1.0), good);
    const auto a_bad = sample_direct(CoefficientModel::constant(1.0), bad);
    const auto b_good = sample_direct(CoefficientModel::constant(0.0), good);
    const GridFunction u0 = point_mass(spec);
    CHECK_THROWS_AS(solve(u0, SourceTerm::zero(), a_bad, b_good, cfg), shape_error);
    const auto a_neg = sample_direct(CoefficientModel::constant(-1.0), good);
    CHECK_THROWS_AS(solve(u0, SourceTerm::zero(), a_neg, b_good, cfg), positivity_error);
    SolveConfig odd = cfg;
    odd.time_steps = 63;
    CHECK_THROWS_AS(solve(u0, SourceTerm::zero(), a_good, b_good, odd), invalid_input);
    SolveConfig badout = cfg;
    badout.output_nodes = {3};
    CHECK_THROWS_AS(solve(u0, SourceTerm::zero(), a_good, b_good, badout), invalid_input);
}
