#include "latheat/coefficients.hpp"

#include <algorithm>
#include <cmath>

namespace latheat {

double RegularPart::eval(double t) const {
    switch (kind) {
        case Kind::constant: return value;
        case Kind::polynomial: {
            double acc = 0.0;
            for (std::size_t i = poly.size(); i-- > 0;) acc = acc * t + poly[i];
            return acc;
        }
        case Kind::oscillation: return base + amplitude * std::sin(omega * t);
    }
    return 0.0;
}

double RegularPart::eval_derivative(double t) const {
    switch (kind) {
        case Kind::constant: return 0.0;
        case Kind::polynomial: {
            double acc = 0.0;
            for (std::size_t i = poly.size(); i-- > 1;) acc = acc * t + i * poly[i];
            return acc;
        }
        case Kind::oscillation: return amplitude * omega * std::cos(omega * t);
    }
    return 0.0;
}

CoefficientModel CoefficientModel::constant(double c) {
    CoefficientModel m;
    m.regular.kind = RegularPart::Kind::constant;
    m.regular.value = c;
    return m;
}

void CoefficientModel::validate_atoms(double horizon) const {
    for (const auto& list : {delta_atoms, heaviside_atoms})
        for (const Atom& at : list)
            if (at.t0 < 0.0 || at.t0 > horizon)
                throw invalid_input("CoefficientModel: atom time outside [0, T]");
}

void CoefficientModel::require_diffusion_admissible(double horizon, double floor) const {
    validate_atoms(horizon);
    for (const auto& list : {delta_atoms, heaviside_atoms})
        for (const Atom& at : list)
            if (at.weight < 0.0)
                throw positivity_error("CoefficientModel: negative atom weight in a diffusion "
                                       "coefficient");
    const int probes = 4096;
    for (int i = 0; i <= probes; ++i) {
        const double t = horizon * i / probes;
        if (regular.eval(t) < floor)
            throw positivity_error("CoefficientModel: regular part dips below the floor");
    }
}

// ---------------------------------------------------------------------------
// Mollifier.
// ---------------------------------------------------------------------------

namespace {

inline double bump_raw(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return std::exp(-1.0 / (x * (1.0 - x)));
}

inline double bump_raw_derivative(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    const double p = x * (1.0 - x);
    return bump_raw(x) * (1.0 - 2.0 * x) / (p * p);
}

constexpr int kCdfIntervals = 8192;

} // namespace

Mollifier::Mollifier() {
    // One-time normalization: 64 Gauss panels of order 16 leave the mass
    // exact to machine precision (the integrand is smooth and flat at the
    // support edges).
    const double mass = gauss_integrate([](double x) { return bump_raw(x); }, 0.0, 1.0, 64, 16);
    norm_ = 1.0 / mass;

    dx_ = 1.0 / kCdfIntervals;
    cdf_table_.resize(kCdfIntervals + 1);
    cdf_table_[0] = 0.0;
    for (int i = 0; i < kCdfIntervals; ++i) {
        const double lo = i * dx_;
        const double piece =
            gauss_integrate([this](double x) { return psi(x); }, lo, lo + dx_, 1, 12);
        cdf_table_[static_cast<std::size_t>(i) + 1] = cdf_table_[static_cast<std::size_t>(i)] + piece;
    }
    // Pin the endpoint: the table's last entry is 1 up to quadrature rounding.
    cdf_table_.back() = 1.0;
}

const Mollifier& Mollifier::standard() {
    static const Mollifier instance;
    return instance;
}

double Mollifier::psi(double x) const { return norm_ * bump_raw(x); }

double Mollifier::psi_derivative(double x) const { return norm_ * bump_raw_derivative(x); }

double Mollifier::cdf(double x) const {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double pos = x / dx_;
    int i = static_cast<int>(pos);
    if (i >= kCdfIntervals) i = kCdfIntervals - 1;
    const double u = pos - i;
    const double f0 = cdf_table_[static_cast<std::size_t>(i)];
    const double f1 = cdf_table_[static_cast<std::size_t>(i) + 1];
    // Cubic Hermite with exact slopes psi(x_i); both slopes are nonnegative
    // and the data is increasing, so the Fritsch-Carlson region only needs a
    // guard when the secant degenerates near the support edges.
    const double secant = (f1 - f0) / dx_;
    double d0 = psi(i * dx_);
    double d1 = psi((i + 1) * dx_);
    if (secant <= 0.0) {
        d0 = d1 = 0.0;
    } else {
        const double cap = 3.0 * secant;
        d0 = std::min(d0, cap);
        d1 = std::min(d1, cap);
    }
    const double h00 = (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u);
    const double h10 = u * (1.0 - u) * (1.0 - u);
    const double h01 = u * u * (3.0 - 2.0 * u);
    const double h11 = u * u * (u - 1.0);
    return h00 * f0 + h10 * dx_ * d0 + h01 * f1 + h11 * dx_ * d1;
}

double OmegaSchedule::operator()(double eps) const {
    if (!(eps > 0.0) || eps > 1.0) throw invalid_input("omega schedule: eps outside (0, 1]");
    switch (kind) {
        case Kind::log_reciprocal: return 1.0 / (1.0 + std::abs(std::log(eps)));
        case Kind::power: return std::pow(eps, exponent);
    }
    return 0.0;
}

std::string OmegaSchedule::describe() const {
    if (kind == Kind::log_reciprocal) return "1/(1+|log eps|)";
    return "eps^" + std::to_string(exponent);
}

// ---------------------------------------------------------------------------
// Regularization.
// ---------------------------------------------------------------------------

double regularized_value(const CoefficientModel& m, double omega, const Mollifier& moll,
                         double t, double horizon) {
    // Regular part, extended by its formula: (r * psi_w)(t) = int r(t - w v) psi(v) dv.
    double acc;
    if (m.regular.kind == RegularPart::Kind::constant) {
        acc = m.regular.value; // unit mass leaves constants fixed
    } else {
        acc = gauss_integrate(
            [&](double v) { return m.regular.eval(t - omega * v) * moll.psi(v); }, 0.0, 1.0, 12,
            12);
    }
    for (const Atom& at : m.delta_atoms) acc += at.weight * moll.psi((t - at.t0) / omega) / omega;
    for (const Atom& at : m.heaviside_atoms)
        acc += at.weight * (moll.cdf((t - at.t0) / omega) - moll.cdf((t - horizon) / omega));
    return acc;
}

double regularized_derivative(const CoefficientModel& m, double omega, const Mollifier& moll,
                              double t, double horizon) {
    double acc;
    if (m.regular.kind == RegularPart::Kind::constant) {
        acc = 0.0;
    } else {
        acc = gauss_integrate(
            [&](double v) { return m.regular.eval_derivative(t - omega * v) * moll.psi(v); },
            0.0, 1.0, 12, 12);
    }
    for (const Atom& at : m.delta_atoms)
        acc += at.weight * moll.psi_derivative((t - at.t0) / omega) / (omega * omega);
    for (const Atom& at : m.heaviside_atoms)
        acc += at.weight * (moll.psi((t - at.t0) / omega) - moll.psi((t - horizon) / omega)) /
               omega;
    return acc;
}

SampledCoefficient regularize(const CoefficientModel& m, double eps, const Mollifier& moll,
                              const OmegaSchedule& schedule, const TimeGrid& grid) {
    if (!(eps > 0.0) || eps > 1.0) throw invalid_input("regularize: eps outside (0, 1]");
    const double omega = schedule(eps);
    if (grid.count > 1 && grid.dt > omega / 16.0 + 1e-15)
        throw invalid_input("regularize: time grid too coarse for omega(eps)/16");
    m.validate_atoms(grid.horizon());

    SampledCoefficient out;
    out.grid = grid;
    out.values.resize(static_cast<std::size_t>(grid.count));
    out.derivative_values.resize(static_cast<std::size_t>(grid.count));
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < grid.count; ++i) {
        const double t = grid.node(static_cast<int>(i));
        out.values[static_cast<std::size_t>(i)] =
            regularized_value(m, omega, moll, t, grid.horizon());
        out.derivative_values[static_cast<std::size_t>(i)] =
            regularized_derivative(m, omega, moll, t, grid.horizon());
    }
    return out;
}

SampledCoefficient sample_direct(const CoefficientModel& m, const TimeGrid& grid) {
    if (m.has_atoms())
        throw invalid_input("sample_direct: model has distributional parts; regularize it");
    SampledCoefficient out;
    out.grid = grid;
    out.values.resize(static_cast<std::size_t>(grid.count));
    out.derivative_values.resize(static_cast<std::size_t>(grid.count));
    for (int i = 0; i < grid.count; ++i) {
        out.values[static_cast<std::size_t>(i)] = m.regular.eval(grid.node(i));
        out.derivative_values[static_cast<std::size_t>(i)] = m.regular.eval_derivative(grid.node(i));
    }
    return out;
}

double SampledCoefficient::min_value() const {
    return *std::min_element(values.begin(), values.end());
}

double SampledCoefficient::sup_abs_value() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

double SampledCoefficient::sup_abs_derivative() const {
    double m = 0.0;
    for (double v : derivative_values) m = std::max(m, std::abs(v));
    return m;
}

ModeratenessReport moderateness_bounds(const CoefficientModel& m, const Mollifier& moll,
                                       const OmegaSchedule& schedule,
                                       std::span<const double> eps_grid, double horizon) {
    if (eps_grid.size() < 4)
        throw invalid_input("moderateness_bounds: need at least 4 eps values");
    const double lo = *std::min_element(eps_grid.begin(), eps_grid.end());
    const double hi = *std::max_element(eps_grid.begin(), eps_grid.end());
    if (hi / lo < 100.0)
        throw invalid_input("moderateness_bounds: eps grid must span at least two decades");

    ModeratenessReport rep;
    rep.eps.assign(eps_grid.begin(), eps_grid.end());
    for (double eps : eps_grid) {
        const double omega = schedule(eps);
        // Fine grid so the sampled sup resolves the mollifier peak.
        const int count = std::max(513, static_cast<int>(std::ceil(horizon / (omega / 64.0))) + 1);
        TimeGrid grid{0.0, horizon / (count - 1), count};
        double sv = 0.0, sd = 0.0;
        for (int i = 0; i < count; ++i) {
            const double t = grid.node(i);
            sv = std::max(sv, std::abs(regularized_value(m, omega, moll, t, horizon)));
            sd = std::max(sd, std::abs(regularized_derivative(m, omega, moll, t, horizon)));
        }
        rep.sup_value.push_back(sv);
        rep.sup_derivative.push_back(sd);
    }

    std::vector<double> x;
    for (double eps : eps_grid) x.push_back(std::log(1.0 / eps));
    auto fit_log = [&](const std::vector<double>& sup) {
        std::vector<double> y;
        for (double v : sup) y.push_back(std::log(std::max(v, 1e-300)));
        return fit_line(x, y);
    };
    rep.value_fit = fit_log(rep.sup_value);
    rep.derivative_fit = fit_log(rep.sup_derivative);
    return rep;
}

double strict_positivity_check(const SampledCoefficient& c) {
    const double m = c.min_value();
    if (!(m > 0.0)) throw positivity_error("strict_positivity_check: grid minimum is not positive");
    return m;
}

} // namespace latheat
