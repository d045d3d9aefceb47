#include "latheat/lattice.hpp"

#include <algorithm>
#include <cmath>

namespace latheat {

void LatticeSpec::validate() const {
    if (dim < 1 || dim > kMaxDim) throw invalid_input("LatticeSpec: dim out of range");
    if (!(hbar > 0.0) || !std::isfinite(hbar))
        throw invalid_input("LatticeSpec: spacing must be positive");
    if (points < 2 || points % 2 != 0)
        throw invalid_input("LatticeSpec: points per axis must be even and >= 2");
}

std::size_t axis_stride(const LatticeSpec& spec, int axis) {
    std::size_t s = 1;
    for (int d = spec.dim - 1; d > axis; --d) s *= static_cast<std::size_t>(spec.points);
    return s;
}

int signed_component(const LatticeSpec& spec, std::size_t flat, int axis) {
    const std::size_t s = axis_stride(spec, axis);
    const int i = static_cast<int>((flat / s) % static_cast<std::size_t>(spec.points));
    return i - spec.points / 2;
}

std::size_t flat_index(const LatticeSpec& spec, std::span<const int> m) {
    if (static_cast<int>(m.size()) != spec.dim) throw shape_error("flat_index: index arity");
    std::size_t flat = 0;
    for (int d = 0; d < spec.dim; ++d) {
        const int i = m[d] + spec.points / 2;
        if (i < 0 || i >= spec.points) throw invalid_input("flat_index: component out of range");
        flat = flat * static_cast<std::size_t>(spec.points) + static_cast<std::size_t>(i);
    }
    return flat;
}

double site_radius(const LatticeSpec& spec, std::size_t flat) {
    double acc = 0.0;
    for (int d = 0; d < spec.dim; ++d) {
        const double m = signed_component(spec, flat, d);
        acc += m * m;
    }
    return spec.hbar * std::sqrt(acc);
}

double freq_radius_sq(const LatticeSpec& spec, std::size_t flat) {
    const double step = spec.freq_step();
    double acc = 0.0;
    for (int d = 0; d < spec.dim; ++d) {
        const double xi = step * signed_component(spec, flat, d);
        acc += xi * xi;
    }
    return acc;
}

namespace detail {

template <class Tag>
Field<Tag>::Field(LatticeSpec spec, std::vector<complex_t> values)
    : spec_(spec), values_(std::move(values)) {
    spec_.validate();
    if (values_.size() != spec_.site_count())
        throw shape_error("Field: value count does not match the lattice");
    for (const complex_t& z : values_)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw invalid_input("Field: non-finite entry");
}

} // namespace detail

template class detail::Field<GridTag>;
template class detail::Field<SpectralTag>;

namespace {

inline double site_weight(const LatticeSpec& spec, std::size_t flat, double s) {
    if (s == 0.0) return 1.0;
    return std::pow(1.0 + site_radius(spec, flat), 2.0 * s);
}

} // namespace

double weighted_norm(const GridFunction& f, double s) {
    const auto v = f.values();
    const LatticeSpec& spec = f.spec();
    const double sq = block_sum<double>(v.size(), [&](std::size_t i) {
        return site_weight(spec, i, s) * std::norm(v[i]);
    });
    return std::sqrt(sq);
}

complex_t weighted_inner_product(const GridFunction& u, const GridFunction& v, double s) {
    if (u.spec() != v.spec()) throw shape_error("weighted_inner_product: lattice mismatch");
    const auto a = u.values();
    const auto b = v.values();
    const LatticeSpec& spec = u.spec();
    return block_sum<complex_t>(a.size(), [&](std::size_t i) {
        return site_weight(spec, i, s) * a[i] * std::conj(b[i]);
    });
}

double l2_distance(const GridFunction& u, const GridFunction& v) {
    if (u.spec() != v.spec()) throw shape_error("l2_distance: lattice mismatch");
    const auto a = u.values();
    const auto b = v.values();
    const double sq =
        block_sum<double>(a.size(), [&](std::size_t i) { return std::norm(a[i] - b[i]); });
    return std::sqrt(sq);
}

GridFunction plane_wave(const LatticeSpec& spec, std::span<const int> mode) {
    spec.validate();
    if (static_cast<int>(mode.size()) != spec.dim) throw shape_error("plane_wave: mode arity");
    std::vector<complex_t> v(spec.site_count());
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(v.size()); ++i) {
        double phase = 0.0;
        for (int d = 0; d < spec.dim; ++d)
            phase += static_cast<double>(signed_component(spec, i, d)) * mode[d];
        phase *= 2.0 * kPi / spec.points;
        v[static_cast<std::size_t>(i)] = std::polar(1.0, phase);
    }
    return GridFunction(spec, std::move(v), GridFunction::unchecked{});
}

GridFunction point_mass(const LatticeSpec& spec) {
    spec.validate();
    std::vector<complex_t> v(spec.site_count());
    std::vector<int> origin(spec.dim, 0);
    v[flat_index(spec, origin)] = 1.0;
    return GridFunction(spec, std::move(v), GridFunction::unchecked{});
}

GridFunction constant_grid(const LatticeSpec& spec, complex_t value) {
    spec.validate();
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
        throw invalid_input("constant_grid: non-finite value");
    return GridFunction(spec, std::vector<complex_t>(spec.site_count(), value),
                        GridFunction::unchecked{});
}

GridFunction random_grid(const LatticeSpec& spec, Rng& rng) {
    spec.validate();
    std::vector<complex_t> v(spec.site_count());
    for (auto& z : v) z = complex_t(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    return GridFunction(spec, std::move(v), GridFunction::unchecked{});
}

SpectralFunction gaussian_band_spectrum(const LatticeSpec& spec, double sigma, int band,
                                        double amplitude) {
    spec.validate();
    if (!(sigma > 0.0)) throw invalid_input("gaussian_band_spectrum: sigma must be positive");
    if (band < 0 || band >= spec.points / 2)
        throw invalid_input("gaussian_band_spectrum: band exceeds the dual grid");
    std::vector<complex_t> v(spec.site_count());
    for (std::size_t i = 0; i < v.size(); ++i) {
        bool inside = true;
        for (int d = 0; d < spec.dim && inside; ++d)
            inside = std::abs(signed_component(spec, i, d)) <= band;
        if (!inside) continue;
        v[i] = amplitude * std::exp(-freq_radius_sq(spec, i) / (2.0 * sigma * sigma));
    }
    return SpectralFunction(spec, std::move(v), SpectralFunction::unchecked{});
}

SpectralFunction mode_spectrum(const LatticeSpec& spec, std::span<const int> mode,
                               complex_t value) {
    spec.validate();
    std::vector<complex_t> v(spec.site_count());
    v[flat_index(spec, mode)] = value;
    return SpectralFunction(spec, std::move(v), SpectralFunction::unchecked{});
}

namespace {

template <class Op>
GridFunction combine(const GridFunction& u, const GridFunction& v, Op&& op) {
    if (u.spec() != v.spec()) throw shape_error("grid combine: lattice mismatch");
    std::vector<complex_t> out(u.size());
    const auto a = u.values();
    const auto b = v.values();
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(out.size()); ++i)
        out[static_cast<std::size_t>(i)] =
            op(a[static_cast<std::size_t>(i)], b[static_cast<std::size_t>(i)]);
    return GridFunction(u.spec(), std::move(out), GridFunction::unchecked{});
}

} // namespace

GridFunction add(const GridFunction& u, const GridFunction& v) {
    return combine(u, v, [](complex_t a, complex_t b) { return a + b; });
}

GridFunction subtract(const GridFunction& u, const GridFunction& v) {
    return combine(u, v, [](complex_t a, complex_t b) { return a - b; });
}

GridFunction scale(const GridFunction& u, complex_t c) {
    std::vector<complex_t> out(u.size());
    const auto a = u.values();
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(out.size()); ++i)
        out[static_cast<std::size_t>(i)] = c * a[static_cast<std::size_t>(i)];
    return GridFunction(u.spec(), std::move(out), GridFunction::unchecked{});
}

} // namespace latheat
