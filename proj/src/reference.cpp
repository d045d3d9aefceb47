#include "latheat/reference.hpp"

#include <cmath>

namespace latheat::ref {

double weighted_norm(const GridFunction& f, double s) {
    const LatticeSpec& spec = f.spec();
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        acc += std::pow(1.0 + site_radius(spec, i), 2.0 * s) * std::norm(f[i]);
    return std::sqrt(acc);
}

complex_t weighted_inner_product(const GridFunction& u, const GridFunction& v, double s) {
    if (u.spec() != v.spec()) throw shape_error("ref::weighted_inner_product: lattice mismatch");
    const LatticeSpec& spec = u.spec();
    complex_t acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        acc += std::pow(1.0 + site_radius(spec, i), 2.0 * s) * u[i] * std::conj(v[i]);
    return acc;
}

SpectralFunction forward(const GridFunction& f) {
    const LatticeSpec& spec = f.spec();
    const std::size_t count = spec.site_count();
    std::vector<complex_t> out(count);
    for (std::size_t q = 0; q < count; ++q) {
        complex_t acc = 0.0;
        for (std::size_t k = 0; k < count; ++k) {
            double phase = 0.0;
            for (int d = 0; d < spec.dim; ++d)
                phase += static_cast<double>(signed_component(spec, k, d)) *
                         static_cast<double>(signed_component(spec, q, d));
            acc += f[k] * std::polar(1.0, -2.0 * kPi * phase / spec.points);
        }
        out[q] = std::pow(spec.hbar, 0.5 * spec.dim) * acc;
    }
    return SpectralFunction(spec, std::move(out), SpectralFunction::unchecked{});
}

GridFunction inverse(const SpectralFunction& g) {
    const LatticeSpec& spec = g.spec();
    const std::size_t count = spec.site_count();
    std::vector<complex_t> out(count);
    for (std::size_t k = 0; k < count; ++k) {
        complex_t acc = 0.0;
        for (std::size_t q = 0; q < count; ++q) {
            double phase = 0.0;
            for (int d = 0; d < spec.dim; ++d)
                phase += static_cast<double>(signed_component(spec, k, d)) *
                         static_cast<double>(signed_component(spec, q, d));
            acc += g[q] * std::polar(1.0, 2.0 * kPi * phase / spec.points);
        }
        out[k] = std::pow(spec.hbar, 0.5 * spec.dim) * spec.dual_cell_volume() * acc;
    }
    return GridFunction(spec, std::move(out), GridFunction::unchecked{});
}

GridFunction apply_stencil(const GridFunction& f, const StencilKernel& kernel) {
    const LatticeSpec& spec = f.spec();
    if (kernel.dim != spec.dim) throw shape_error("ref::apply_stencil: dimension mismatch");
    const int R = kernel.radius;
    const int N = spec.points;
    std::vector<complex_t> out(f.size());
    for (std::size_t site = 0; site < f.size(); ++site) {
        std::vector<int> j(static_cast<std::size_t>(spec.dim), -R);
        complex_t acc = 0.0;
        for (std::size_t c = 0; c < kernel.coeffs.size(); ++c) {
            std::size_t shifted = 0;
            for (int d = 0; d < spec.dim; ++d) {
                int i = signed_component(spec, site, d) + j[static_cast<std::size_t>(d)] + N / 2;
                i = ((i % N) + N) % N;
                shifted = shifted * static_cast<std::size_t>(N) + static_cast<std::size_t>(i);
            }
            acc += kernel.coeffs[c] * f[shifted];
            for (int d = spec.dim - 1; d >= 0; --d) {
                if (++j[static_cast<std::size_t>(d)] <= R) break;
                j[static_cast<std::size_t>(d)] = -R;
            }
        }
        out[site] = acc;
    }
    return GridFunction(spec, std::move(out), GridFunction::unchecked{});
}

double stencil_coefficient(double alpha, int dim, std::span<const int> j, int quad_points) {
    const int M = quad_points;
    std::vector<int> q(static_cast<std::size_t>(dim), 0);
    double acc = 0.0;
    bool done = false;
    while (!done) {
        double symbol = 0.0;
        double phase = 0.0;
        for (int d = 0; d < dim; ++d) {
            const double sn = std::sin(kPi * q[static_cast<std::size_t>(d)] / M);
            symbol += 4.0 * sn * sn;
            phase += static_cast<double>(j[static_cast<std::size_t>(d)]) *
                     q[static_cast<std::size_t>(d)];
        }
        acc += std::pow(symbol, alpha) * std::cos(2.0 * kPi * phase / M);
        done = true;
        for (int d = dim - 1; d >= 0; --d) {
            if (++q[static_cast<std::size_t>(d)] < M) {
                done = false;
                break;
            }
            q[static_cast<std::size_t>(d)] = 0;
        }
    }
    double scale = 1.0;
    for (int d = 0; d < dim; ++d) scale /= M;
    return scale * acc;
}

} // namespace latheat::ref
