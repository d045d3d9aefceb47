#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "latheat/numerics.hpp"

namespace latheat {

// ---------------------------------------------------------------------------
// Time-dependent coefficients with distributional parts, and their
// regularizations by a right-supported Friedrichs mollifier.
// ---------------------------------------------------------------------------

// Closed-form regular part: constant, polynomial in t, or c0 + c1 sin(w t).
struct RegularPart {
    enum class Kind { constant, polynomial, oscillation };
    Kind kind = Kind::constant;
    double value = 0.0;               // constant
    std::vector<double> poly;         // polynomial coefficients, poly[i] * t^i
    double base = 0.0, amplitude = 0.0, omega = 1.0; // oscillation

    double eval(double t) const;
    double eval_derivative(double t) const;
};

struct Atom {
    double t0 = 0.0;
    double weight = 0.0;
};

// Regular part (a smooth function of t, extended by its formula beyond [0,T])
// plus delta and Heaviside atoms supported in [0, T]. Heaviside atoms switch
// on at t0 and persist through the horizon.
struct CoefficientModel {
    RegularPart regular;
    std::vector<Atom> delta_atoms;
    std::vector<Atom> heaviside_atoms;

    static CoefficientModel constant(double c);

    bool has_atoms() const { return !delta_atoms.empty() || !heaviside_atoms.empty(); }

    // Value of the model at t ignoring atoms (exact for atom-free models).
    double regular_value(double t) const { return regular.eval(t); }

    // Diffusion-coefficient admissibility: regular part >= floor on [0, T]
    // (checked on a fine grid) and all atom weights >= 0.
    void require_diffusion_admissible(double horizon, double floor) const;

    // Atom times must lie in [0, horizon].
    void validate_atoms(double horizon) const;
};

// ---------------------------------------------------------------------------
// Mollifier: psi(x) = c * exp(-1/(x(1-x))) on (0,1), zero outside, with c
// fixed once so that the mass is 1 to 1e-12. The antiderivative Psi is
// tabulated once (per-interval Gauss panels) and evaluated by a monotone
// cubic Hermite interpolant with exact psi slopes.
// ---------------------------------------------------------------------------

class Mollifier {
  public:
    static const Mollifier& standard();

    double normalization() const { return norm_; }
    double psi(double x) const;
    double psi_derivative(double x) const;
    double cdf(double x) const; // Psi, clamped to [0,1] outside the support
    double peak() const { return psi(0.5); }

  private:
    Mollifier();
    double norm_ = 1.0;
    double dx_ = 0.0;
    std::vector<double> cdf_table_; // at nodes i*dx_
};

// omega(eps): how fast the mollifier shrinks along a net.
struct OmegaSchedule {
    enum class Kind { log_reciprocal, power };
    Kind kind = Kind::log_reciprocal;
    double exponent = 1.0; // for power: omega = eps^exponent

    double operator()(double eps) const;
    std::string describe() const;
};

// ---------------------------------------------------------------------------
// Sampled coefficient on a uniform time grid.
// ---------------------------------------------------------------------------

struct TimeGrid {
    double t0 = 0.0;
    double dt = 0.0;
    int count = 1; // number of nodes

    double node(int i) const { return t0 + dt * i; }
    double horizon() const { return t0 + dt * (count - 1); }
};

struct SampledCoefficient {
    TimeGrid grid;
    std::vector<double> values;
    std::vector<double> derivative_values;

    double min_value() const;
    double sup_abs_value() const;
    double sup_abs_derivative() const;
};

// Exact pointwise evaluation of (model * psi_omega)(t) and its t-derivative:
// delta atoms contribute w psi_omega(t - t0); Heaviside atoms switch on at t0
// and off at the horizon (their support is [t0, T]), contributing
// w (Psi((t-t0)/omega) - Psi((t-T)/omega)), which is w Psi((t-t0)/omega) on
// [0, T]; the regular part is convolved by Gauss panels against psi.
double regularized_value(const CoefficientModel& m, double omega, const Mollifier& moll,
                         double t, double horizon);
double regularized_derivative(const CoefficientModel& m, double omega, const Mollifier& moll,
                              double t, double horizon);

// Sample the regularization a_eps = a * psi_{omega(eps)} on `grid`.
// Requires eps in (0,1] and grid.dt <= omega(eps)/16 (the grid must resolve
// the mollifier's internal layer).
SampledCoefficient regularize(const CoefficientModel& m, double eps, const Mollifier& moll,
                              const OmegaSchedule& schedule, const TimeGrid& grid);

// Sample an atom-free model directly (no mollification).
SampledCoefficient sample_direct(const CoefficientModel& m, const TimeGrid& grid);

// ---------------------------------------------------------------------------
// Moderateness diagnostics: least-squares growth exponents of sup|a_eps| and
// sup|a_eps'| against log(1/eps). Reported, not gated.
// ---------------------------------------------------------------------------

struct ModeratenessReport {
    std::vector<double> eps;
    std::vector<double> sup_value;
    std::vector<double> sup_derivative;
    LinearFit value_fit;      // slope ~ N in sup|a_eps| <= c eps^-N
    LinearFit derivative_fit; // slope ~ N+1
};

// Requires >= 4 eps values spanning >= 2 decades.
ModeratenessReport moderateness_bounds(const CoefficientModel& m, const Mollifier& moll,
                                       const OmegaSchedule& schedule,
                                       std::span<const double> eps_grid, double horizon);

// Returns the grid minimum if positive; throws positivity_error otherwise.
double strict_positivity_check(const SampledCoefficient& c);

} // namespace latheat
