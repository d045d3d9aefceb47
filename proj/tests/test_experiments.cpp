#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "latheat/experiments.hpp"
#include "latheat/fourier.hpp"

using namespace latheat;

namespace {

const OmegaSchedule kLog{OmegaSchedule::Kind::log_reciprocal, 1.0};
const OmegaSchedule kPower{OmegaSchedule::Kind::power, 1.0};

std::vector<double> dyadic(int jmin, int jmax) {
    std::vector<double> g;
    for (int j = jmin; j <= jmax; ++j) g.push_back(std::pow(2.0, -j));
    return g;
}

NetProblem small_problem() {
    NetProblem p;
    p.spec = LatticeSpec{1, 1.0, 16};
    p.alpha = 0.75;
    p.horizon = 1.0;
    p.weight_order = 0.0;
    p.time_steps = 256;
    p.a = CoefficientModel::constant(1.0);
    p.b = CoefficientModel::constant(0.0);
    p.u0 = inverse(gaussian_band_spectrum(p.spec, 0.4, 4));
    return p;
}

} // namespace

TEST_CASE("regular coefficients give an eps-flat net") {
    {
        // constants are exact fixed points: the net is flat to rounding
        NetProblem p = small_problem();
        p.b = CoefficientModel::constant(0.3);
        const std::vector<double> eps = dyadic(2, 7);
        const NetReport rep = very_weak_solve(p, eps, Mollifier::standard(), kPower);
        REQUIRE(rep.pass);
        for (double n : rep.norms)
            CHECK(std::abs(n - rep.norms.front()) <= 1e-6 * rep.norms.front());
        CHECK(std::abs(rep.fit.slope) < 1e-8);
    }
    {
        // smooth nonconstant coefficients converge, so the tail slope is flat
        NetProblem p = small_problem();
        p.a.regular.kind = RegularPart::Kind::polynomial;
        p.a.regular.poly = {1.0, 0.25};
        p.b = CoefficientModel::constant(0.3);
        const std::vector<double> eps = dyadic(2, 7);
        const NetReport rep = very_weak_solve(p, eps, Mollifier::standard(), kPower);
        REQUIRE(rep.pass);
        CHECK(std::abs(rep.fit.slope) < 0.02);
        // consecutive differences shrink along the net
        const double d_head = std::abs(rep.norms[1] - rep.norms[0]);
        const double d_tail = std::abs(rep.norms.back() - rep.norms[rep.norms.size() - 2]);
        CHECK(d_tail < 0.2 * d_head);
    }
}

TEST_CASE("distributional damping keeps the net bounded") {
    NetProblem p = small_problem();
    p.b.delta_atoms.push_back({0.0, 1.0});
    p.b.heaviside_atoms.push_back({0.0, 1.0});
    const std::vector<double> eps = dyadic(2, 12);
    const NetReport rep = very_weak_solve(p, eps, Mollifier::standard(), kLog);
    REQUIRE(rep.pass);
    for (const std::string& note : rep.notes) CHECK(note.empty());
    CHECK(std::abs(rep.fit.slope) <= 0.2);
    // extra damping only shrinks the solution below the b = 0 run
    NetProblem p0 = small_problem();
    const NetReport rep0 = very_weak_solve(p0, eps, Mollifier::standard(), kLog);
    for (std::size_t i = 0; i < eps.size(); ++i) CHECK(rep.norms[i] <= rep0.norms[i] + 1e-12);
}

TEST_CASE("a delta atom in the diffusion coefficient only dissipates") {
    NetProblem p = small_problem();
    p.a.delta_atoms.push_back({0.5, 1.0});
    const std::vector<double> eps = dyadic(2, 9);
    const NetReport rep = very_weak_solve(p, eps, Mollifier::standard(), kLog);
    REQUIRE(rep.pass);
    const NetReport base = very_weak_solve(small_problem(), eps, Mollifier::standard(), kLog);
    for (std::size_t i = 0; i < eps.size(); ++i) CHECK(rep.norms[i] <= base.norms[i] + 1e-12);
}

TEST_CASE("positivity failures are recorded per eps and the sweep continues") {
    NetProblem p = small_problem();
    // regular part dips to -0.2: every regularization fails the gate
    p.a.regular.kind = RegularPart::Kind::oscillation;
    p.a.regular.base = 0.3;
    p.a.regular.amplitude = 0.5;
    p.a.regular.omega = 20.0;
    const std::vector<double> eps = dyadic(2, 6);
    const NetReport rep = very_weak_solve(p, eps, Mollifier::standard(), kLog);
    CHECK_FALSE(rep.pass);
    bool some_note = false;
    for (const std::string& note : rep.notes) some_note = some_note || !note.empty();
    CHECK(some_note);
}

TEST_CASE("identical pipelines produce an exactly zero difference") {
    NetProblem p = small_problem();
    const std::vector<double> eps = dyadic(2, 6);
    const NetReport rep =
        uniqueness_experiment(p, eps, Mollifier::standard(), kLog, 1, PerturbTarget::none);
    CHECK(rep.all_zero);
    CHECK(rep.pass);
    for (double n : rep.norms) CHECK(n == 0.0);
}

TEST_CASE("negligible perturbations decay at their order") {
    NetProblem p = small_problem();
    p.b.delta_atoms.push_back({0.0, 1.0});
    p.b.heaviside_atoms.push_back({0.0, 1.0});
    const std::vector<double> eps = dyadic(2, 9);
    for (int q : {1, 2}) {
        const NetReport rep =
            uniqueness_experiment(p, eps, Mollifier::standard(), kLog, q, PerturbTarget::b);
        REQUIRE(rep.pass);
        CHECK(rep.fit.slope <= -q + 0.5);
        CHECK(rep.fit.slope == doctest::Approx(-q).epsilon(0.08));
    }
}

TEST_CASE("single-mode perturbation matches the first-order oracle") {
    // u0 = one dual mode, a = 1, b = 0 perturbed by eps^2: the difference is
    // |e^{-eps^2 t} - 1| e^{-nu2 t} ||u0|| per time, L2-integrated in t.
    NetProblem p = small_problem();
    p.u0 = inverse(mode_spectrum(p.spec, std::vector<int>{3}, 1.0));
    const std::vector<double> eps = dyadic(2, 6);
    const NetReport rep =
        uniqueness_experiment(p, eps, Mollifier::standard(), kLog, 2, PerturbTarget::b);
    REQUIRE(rep.pass);
    const SymbolField sym = lattice_symbol(p.spec, p.alpha);
    const double nu2 = sym.values[flat_index(p.spec, std::vector<int>{3})];
    const double u0n = weighted_norm(p.u0, 0.0);
    for (std::size_t i = 0; i < eps.size(); ++i) {
        const double e2 = eps[i] * eps[i];
        // oracle via fine Simpson of the closed-form difference
        const int steps = 512;
        std::vector<double> sq(steps + 1);
        for (int k = 0; k <= steps; ++k) {
            const double t = p.horizon * k / steps;
            const double d = (1.0 - std::exp(-e2 * t)) * std::exp(-nu2 * t) * u0n;
            sq[static_cast<std::size_t>(k)] = d * d;
        }
        const double oracle = std::sqrt(simpson_integral(sq, p.horizon / steps));
        CHECK(rep.norms[i] == doctest::Approx(oracle).epsilon(1e-6));
    }
}

TEST_CASE("consistency: constant coefficients are reproduced exactly") {
    NetProblem p = small_problem();
    p.b = CoefficientModel::constant(0.4);
    const std::vector<double> eps = dyadic(2, 6);
    const ConsistencyResult res =
        consistency_experiment(p, eps, Mollifier::standard(), kPower);
    CHECK(res.report.pass);
    for (double n : res.report.norms) CHECK(n <= 1e-12 * res.classical_norm);
}

TEST_CASE("consistency converges at the mollification rate") {
    NetProblem p = small_problem();
    p.a.regular.kind = RegularPart::Kind::polynomial;
    p.a.regular.poly = {1.0, 0.5}; // 1 + t/2
    p.b.regular.kind = RegularPart::Kind::oscillation;
    p.b.regular.base = 0.0;
    p.b.regular.amplitude = 1.0;
    p.b.regular.omega = 1.0; // sin t
    p.time_steps = 512;
    const std::vector<double> eps = dyadic(2, 12);
    const ConsistencyResult res = consistency_experiment(p, eps, Mollifier::standard(), kPower);
    REQUIRE(res.report.pass);
    // decreasing along the net
    for (std::size_t i = 1; i < res.report.norms.size(); ++i)
        CHECK(res.report.norms[i] <= res.report.norms[i - 1] * 1.05);
    CHECK(res.report.norms.back() <= 1e-3 * res.classical_norm);
    CHECK(res.report.fit.slope == doctest::Approx(1.0).epsilon(0.3));
}

TEST_CASE("consistency with an oscillatory damping and a source decreases across the net") {
    NetProblem p = small_problem();
    p.a.regular.kind = RegularPart::Kind::polynomial;
    p.a.regular.poly = {1.0, 0.25};
    p.b.regular.kind = RegularPart::Kind::oscillation;
    p.b.regular.base = 0.1;
    p.b.regular.amplitude = 0.6;
    p.b.regular.omega = 5.0;
    p.source_profile = inverse(gaussian_band_spectrum(p.spec, 0.4, 4, 0.5));
    p.source_time.regular.kind = RegularPart::Kind::oscillation;
    p.source_time.regular.base = 0.5;
    p.source_time.regular.amplitude = 0.5;
    p.source_time.regular.omega = 2.0;
    const std::vector<double> eps = dyadic(2, 12); // three decades
    const ConsistencyResult res = consistency_experiment(p, eps, Mollifier::standard(), kPower);
    REQUIRE(res.report.pass);
    for (std::size_t i = 1; i < res.report.norms.size(); ++i)
        CHECK(res.report.norms[i] <= res.report.norms[i - 1] * 1.05);
}

TEST_CASE("consistency rejects distributional coefficients") {
    NetProblem p = small_problem();
    p.b.delta_atoms.push_back({0.5, 1.0});
    const std::vector<double> eps = dyadic(2, 6);
    CHECK_THROWS_AS(consistency_experiment(p, eps, Mollifier::standard(), kLog), invalid_input);
}

TEST_CASE("small-spacing limit: single mode matches the closed-form error") {
    LimitProblem lp;
    lp.dim = 1;
    lp.alpha = 1.0;
    lp.smoothness = 4.0;
    lp.base_points = 8;
    lp.j_min = 1;
    lp.j_max = 5;
    lp.horizon = 1.0;
    lp.time_steps = 64;
    lp.output_count = 5;
    lp.data.kind = LimitSpectralData::Kind::single_mode;
    lp.data.mode = {3};
    lp.data.amplitude = 1.0;
    lp.a = CoefficientModel::constant(1.0);
    lp.b = CoefficientModel::constant(0.0);
    const NetReport rep = semiclassical_experiment(lp, Mollifier::standard());
    REQUIRE(rep.pass);
    for (std::size_t row = 0; row < rep.params.size(); ++row) {
        const double hbar = rep.params[row];
        const int points = lp.base_points << (lp.j_min + static_cast<int>(row));
        const LatticeSpec spec{1, hbar, points};
        const SpectralFunction u0h = mode_spectrum(spec, std::vector<int>{3}, 1.0);
        const double u0n = weighted_norm(inverse(u0h), 0.0);
        for (std::size_t c = 0; c < rep.output_times.size(); ++c) {
            const double oracle = single_mode_error_oracle(spec, 1.0, std::vector<int>{3}, 1.0,
                                                           u0n, rep.output_times[c]);
            CHECK(std::abs(rep.per_time[row][c] - oracle) < 1e-8 * std::max(1.0, u0n));
        }
    }
}

TEST_CASE("small-spacing limit: banded data converges at second order") {
    LimitProblem lp;
    lp.dim = 1;
    lp.alpha = 1.0;
    lp.smoothness = 4.0;
    lp.base_points = 8;
    lp.j_min = 1;
    lp.j_max = 5;
    lp.horizon = 1.0;
    lp.time_steps = 64;
    lp.output_count = 5;
    lp.data.kind = LimitSpectralData::Kind::gaussian_band;
    lp.data.sigma = 0.5;
    lp.data.band = 6;
    lp.a = CoefficientModel::constant(1.0);
    lp.b = CoefficientModel::constant(0.0);
    const NetReport rep = semiclassical_experiment(lp, Mollifier::standard());
    REQUIRE(rep.pass);
    CHECK(rep.fit.slope == doctest::Approx(2.0).epsilon(0.1));
    // monotone decrease in hbar
    for (std::size_t i = 1; i < rep.norms.size(); ++i) CHECK(rep.norms[i] < rep.norms[i - 1]);
}

TEST_CASE("limit gates its hypotheses") {
    LimitProblem lp;
    lp.alpha = 1.5; // outside (0, 1]
    CHECK_THROWS_AS(semiclassical_experiment(lp, Mollifier::standard()), invalid_input);
    lp.alpha = 1.0;
    lp.smoothness = 2.0; // below 4 alpha
    CHECK_THROWS_AS(semiclassical_experiment(lp, Mollifier::standard()), invalid_input);
}

TEST_CASE("zero data gives a zero error net") {
    LimitProblem lp;
    lp.dim = 1;
    lp.alpha = 0.5;
    lp.smoothness = 2.0;
    lp.base_points = 8;
    lp.j_min = 1;
    lp.j_max = 4;
    lp.time_steps = 32;
    lp.output_count = 3;
    lp.data.kind = LimitSpectralData::Kind::gaussian_band;
    lp.data.amplitude = 0.0;
    lp.data.band = 2;
    lp.a = CoefficientModel::constant(1.0);
    lp.b = CoefficientModel::constant(0.0);
    const NetReport rep = semiclassical_experiment(lp, Mollifier::standard());
    CHECK(rep.all_zero);
    CHECK(rep.pass);
}

TEST_CASE("two-dimensional nets run through the same pipeline") {
    NetProblem p;
    p.spec = LatticeSpec{2, 1.0, 8};
    p.alpha = 0.6;
    p.horizon = 0.5;
    p.weight_order = 1.0;
    p.time_steps = 128;
    p.a = CoefficientModel::constant(1.0);
    p.a.delta_atoms.push_back({0.25, 0.5});
    p.b = CoefficientModel::constant(0.0);
    p.b.heaviside_atoms.push_back({0.0, 1.0});
    p.u0 = inverse(gaussian_band_spectrum(p.spec, 0.4, 2));
    const std::vector<double> eps = dyadic(2, 6);
    const NetReport rep = very_weak_solve(p, eps, Mollifier::standard(), kLog);
    REQUIRE(rep.pass);
    for (double n : rep.norms) CHECK(std::isfinite(n));
    // extra dissipation from the atoms keeps the net below the plain-heat run
    NetProblem p0 = p;
    p0.a.delta_atoms.clear();
    p0.b.heaviside_atoms.clear();
    const NetReport rep0 = very_weak_solve(p0, eps, Mollifier::standard(), kLog);
    for (std::size_t i = 0; i < eps.size(); ++i) CHECK(rep.norms[i] <= rep0.norms[i] + 1e-12);
}

TEST_CASE("experiments are deterministic run to run") {
    NetProblem p = small_problem();
    p.b.delta_atoms.push_back({0.0, 1.0});
    const std::vector<double> eps = dyadic(2, 6);
    const NetReport r1 = very_weak_solve(p, eps, Mollifier::standard(), kLog);
    const NetReport r2 = very_weak_solve(p, eps, Mollifier::standard(), kLog);
    REQUIRE(r1.norms.size() == r2.norms.size());
    for (std::size_t i = 0; i < r1.norms.size(); ++i) CHECK(r1.norms[i] == r2.norms[i]);
    CHECK(r1.fit.slope == r2.fit.slope);
}
