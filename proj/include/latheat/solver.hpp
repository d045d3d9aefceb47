#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "latheat/coefficients.hpp"
#include "latheat/fraclap.hpp"

namespace latheat {

// ---------------------------------------------------------------------------
// Exact per-frequency solution of the transformed Cauchy problem
//
//   d/dt u^(t,xi) + a(t) nu^2(xi) u^(t,xi) + b(t) u^(t,xi) = f^(t,xi),
//
// by the integrating factor exp(Phi) with Phi(t,xi) = nu^2(xi) A(t) + B(t),
// A, B cumulative Simpson integrals of the sampled a, b. The Duhamel term is
// accumulated with the matching Simpson panels through the shifted recurrence
//
//   D_{i+2} = e^{Phi_i - Phi_{i+2}} D_i
//           + dt/3 ( f_i e^{Phi_i - Phi_{i+2}} + 4 f_{i+1} e^{Phi_{i+1} - Phi_{i+2}} + f_{i+2} ),
//
// whose exponents are never large positive, so high frequencies underflow to
// exact zeros instead of overflowing. Modes are independent and the per-mode
// arithmetic is serial, so results are identical for any thread count.
// ---------------------------------------------------------------------------

enum class SymbolChoice { lattice, continuous };

struct SolveConfig {
    double horizon = 1.0;  // T >= 0
    int time_steps = 2;    // n_t, even; use a multiple of 4 when norm_history is on
    double alpha = 1.0;
    double weight_order = 0.0; // s
    SymbolChoice symbol = SymbolChoice::lattice;
    std::vector<int> output_nodes; // even node indices; empty means all even nodes
    bool keep_spectral = false;
    bool norm_history = false; // record ||u(t)||_{l2_s} at every even node
};

// Source term sampled at every time node. Three shapes:
//   zero       skips the Duhamel accumulation entirely;
//   separable  f(t,k) = profile(k) * factor(t), one transform overall;
//   sampled    a general provider t -> f(t,.), transformed node by node.
struct SourceTerm {
    std::optional<GridFunction> profile;
    std::vector<double> factor; // one value per time node when profile is set
    std::vector<GridFunction> samples; // general form, one field per time node

    static SourceTerm zero() { return {}; }
    static SourceTerm separable(GridFunction p, std::vector<double> f) {
        SourceTerm s;
        s.profile = std::move(p);
        s.factor = std::move(f);
        return s;
    }
    static SourceTerm from_provider(const std::function<GridFunction(double)>& f,
                                    double horizon, int time_steps) {
        SourceTerm s;
        s.samples.reserve(static_cast<std::size_t>(time_steps) + 1);
        for (int i = 0; i <= time_steps; ++i)
            s.samples.push_back(f(horizon * i / time_steps));
        return s;
    }
    bool is_zero() const { return !profile.has_value() && samples.empty(); }
    bool is_separable() const { return profile.has_value(); }
};

struct Trajectory {
    std::vector<double> times;
    std::vector<GridFunction> states;
    std::vector<SpectralFunction> spectral_states; // kept only on request

    std::vector<double> history_times; // even nodes, when norm_history is on
    std::vector<double> norm_history;  // ||u(t)||_{l2_s}

    double max_step_exponent = 0.0; // max lambda*dt seen; Duhamel accuracy indicator
};

// a must pass strict_positivity_check; a, b must be sampled on the solver grid
// (t0 = 0, dt = T/n_t, count = n_t + 1). Deterministic.
Trajectory solve(const GridFunction& u0, const SourceTerm& source, const SampledCoefficient& a,
                 const SampledCoefficient& b, const SolveConfig& cfg);

// E(t) = a(t) ||u^(t,.)||^2_{H^s} at the given output index.
double energy(const Trajectory& traj, const SampledCoefficient& a, double s,
              std::size_t output_index);

// C_{T,a,b} = a0^{-1} ||a||_inf exp( a0^{-1} (||a'||_inf + 2 ||a||_inf ||b||_inf
//             + ||a||_inf) T ), with grid sup-norms.
double wellposedness_constant(const SampledCoefficient& a, const SampledCoefficient& b,
                              double horizon);

// ||u(t)||^2 <= C (||u0||^2 + ||f||^2_{L2_t}) checked at every output time.
struct EstimateReport {
    std::vector<double> ratios;
    double max_ratio = 0.0;
    double constant = 0.0;
    double data_norm_sq = 0.0; // ||u0||^2 + ||f||^2
    bool pass = false;
};

EstimateReport verify_estimate(const Trajectory& traj, const GridFunction& u0,
                               const SourceTerm& source, const SampledCoefficient& a,
                               const SampledCoefficient& b, double s);

// L2-in-time norm over the recorded history: ( integral of ||u(t)||^2 dt )^{1/2},
// composite Simpson over the even-node grid.
double l2_time_norm(const Trajectory& traj);

// ||f||_{L2([0,T]; l2_s)} of a separable source.
double source_l2_norm(const SourceTerm& source, double s, double dt);

} // namespace latheat
